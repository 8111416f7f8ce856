//! Threshold equilibria and closed-form uniqueness conditions for the baseline,
//! exogenous public signal, and market-price environments.
//!
//! Substituting the payoff indifference condition into the critical mass
//! condition leaves a scalar fixed point θ = Φ(a + bθ). In probit coordinates
//! y = Φ⁻¹(θ) this reads y = a + b·Φ(y), which [`ProbitFixedPoint`] solves
//! exactly: every root lies in [a, a + b], and the gap changes monotonicity only
//! at the two points where b·φ(y) = 1.

use serde::Serialize;

use crate::actions;
use crate::error::{Error, Result};
use crate::model::{
    belief_aggregate, market_precision, Environment, Equilibrium, EquilibriumSet, GameParams, UniquenessReport,
};
use crate::numerics::{bisect, std_normal_cdf, std_normal_pdf, std_normal_quantile, Bracket, Tolerances, INV_SQRT_2PI};

/// Maximum number of crossings of Φ(affine) with the identity.
pub const MAX_ROOTS: usize = 3;

/// The fixed point y = intercept + slope·Φ(y) with slope ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbitFixedPoint {
    pub intercept: f64,
    pub slope: f64,
}

/// A root of a [`ProbitFixedPoint`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbitRoot {
    pub y: f64,
    pub degenerate: bool,
}

impl ProbitFixedPoint {
    /// intercept + slope·Φ(y) − y; decreasing wherever slope·φ(y) < 1.
    pub fn gap(&self, y: f64) -> f64 {
        self.intercept + self.slope * std_normal_cdf(y) - y
    }

    /// Slope of θ ↦ Φ(a + bθ) at θ = Φ(y).
    pub fn map_slope(&self, y: f64) -> f64 {
        self.slope * std_normal_pdf(y)
    }

    /// Largest slope of the best-response map, b/√(2π).
    pub fn peak_slope(&self) -> f64 {
        self.slope * INV_SQRT_2PI
    }

    /// All roots in ascending order. Tangencies within `tol.tangency` are reported
    /// once with the degenerate flag.
    pub fn roots(&self, tol: &Tolerances) -> Result<Vec<ProbitRoot>> {
        let (a, b) = (self.intercept, self.slope);
        if !(a.is_finite() && b.is_finite() && b >= 0.0) {
            return Err(Error::Solver(format!("ill-posed fixed point: intercept {a}, slope {b}")));
        }
        let g = |y: f64| self.gap(y);
        let solve_on = |lo: f64, hi: f64| -> Result<ProbitRoot> {
            let (f_lo, f_hi) = (g(lo), g(hi));
            let bracket = Bracket::new(lo, hi, f_lo, f_hi)
                .ok_or_else(|| Error::Solver(format!("no sign change on [{lo}, {hi}]: {f_lo}, {f_hi}")))?;
            Ok(ProbitRoot { y: bisect(g, bracket, tol.x_tol), degenerate: false })
        };
        let tangent = |y: f64| ProbitRoot { y, degenerate: true };

        let (lo, hi) = (a, a + b);
        if lo == hi {
            return Ok(vec![ProbitRoot { y: a, degenerate: false }]);
        }
        if self.peak_slope() <= 1.0 {
            return Ok(vec![solve_on(lo, hi)?]);
        }
        // Local minimum of the gap at −y_c, local maximum at +y_c.
        let y_c = (2.0 * self.peak_slope().ln()).sqrt();
        let (g_min, g_max) = (g(-y_c), g(y_c));
        let flat_min = g_min.abs() <= tol.tangency;
        let flat_max = g_max.abs() <= tol.tangency;

        let roots = if flat_min && flat_max {
            vec![tangent(solve_on(lo, hi)?.y)]
        } else if g_min > tol.tangency {
            vec![solve_on(y_c, hi)?]
        } else if g_max < -tol.tangency {
            vec![solve_on(lo, -y_c)?]
        } else if flat_min {
            vec![tangent(-y_c), solve_on(y_c, hi)?]
        } else if flat_max {
            vec![solve_on(lo, -y_c)?, tangent(y_c)]
        } else {
            vec![solve_on(lo, -y_c)?, solve_on(-y_c, y_c)?, solve_on(y_c, hi)?]
        };
        Ok(roots)
    }
}

/// Composite fixed point when agents also see a public signal of precision
/// `alpha_z` with realization `z`; `alpha_z = 0` is the baseline game.
fn public_signal_fixed_point(params: &GameParams, alpha_z: f64, z: f64) -> Result<ProbitFixedPoint> {
    let env = if alpha_z > 0.0 { Environment::ExogenousSignal { alpha_z, z_value: z } } else { Environment::Baseline };
    let agg = belief_aggregate(params, &env)?;
    let root_alpha_psi = agg.alpha_psi.sqrt();
    let cost_shift = std_normal_quantile(params.cost())? / agg.alpha.sqrt();
    let signal_shift = if alpha_z > 0.0 { alpha_z / agg.alpha * z } else { 0.0 };
    Ok(ProbitFixedPoint {
        intercept: root_alpha_psi * (-signal_shift - agg.mean_shift - cost_shift),
        slope: root_alpha_psi * (alpha_z + params.alpha_p()) / agg.alpha,
    })
}

fn public_signal_equilibria(params: &GameParams, alpha_z: f64, z: f64, tol: &Tolerances) -> Result<EquilibriumSet> {
    let fixed_point = public_signal_fixed_point(params, alpha_z, z)?;
    let alpha = params.alpha_x() + params.alpha_p() + alpha_z;
    // Payoff indifference: ψ* = θ* − (α_z/α)z − Φ⁻¹(c)/√α.
    let psi_offset = alpha_z / alpha * z + std_normal_quantile(params.cost())? / alpha.sqrt();
    let roots = fixed_point.roots(tol)?;
    check_root_count(roots.len())?;
    let equilibria = roots
        .into_iter()
        .map(|r| {
            let theta = std_normal_cdf(r.y);
            Equilibrium {
                theta_star: theta,
                psi_star: theta - psi_offset,
                probit: r.y,
                slope_at_root: fixed_point.map_slope(r.y),
                degenerate: r.degenerate,
            }
        })
        .collect();
    Ok(EquilibriumSet { equilibria })
}

pub(crate) fn check_root_count(n: usize) -> Result<()> {
    match n {
        0 => Err(Error::Solver("no threshold equilibrium found".into())),
        n if n > MAX_ROOTS => Err(Error::Solver(format!("{n} roots found; at most {MAX_ROOTS} are possible"))),
        _ => Ok(()),
    }
}

/// Composite residual Φ(√α_ψ(−Φ⁻¹(c)/√α + θ − (α_x/α)θ − (α_p/α)E[μ])) − θ.
pub fn residual_baseline(theta: f64, params: &GameParams) -> Result<f64> {
    let agg = belief_aggregate(params, &Environment::Baseline)?;
    let psi_star = -std_normal_quantile(params.cost())? / agg.alpha.sqrt() + theta;
    let arg = agg.alpha_psi.sqrt() * (psi_star - agg.weight_x * theta - agg.mean_shift);
    Ok(std_normal_cdf(arg) - theta)
}

/// Composite residual with an exogenous public signal of precision `alpha_z`.
pub fn residual_exogenous(theta: f64, params: &GameParams, alpha_z: f64, z: f64) -> Result<f64> {
    let agg = belief_aggregate(params, &Environment::exogenous(alpha_z, z)?)?;
    let arg = agg.alpha_psi.sqrt()
        * ((alpha_z + params.alpha_p()) / agg.alpha * theta
            - alpha_z / agg.alpha * z
            - agg.mean_shift
            - std_normal_quantile(params.cost())? / agg.alpha.sqrt());
    Ok(std_normal_cdf(arg) - theta)
}

pub fn solve_baseline(params: &GameParams) -> Result<EquilibriumSet> {
    solve_baseline_with(params, &Tolerances::default())
}

pub fn solve_baseline_with(params: &GameParams, tol: &Tolerances) -> Result<EquilibriumSet> {
    public_signal_equilibria(params, 0.0, 0.0, tol)
}

pub fn solve_exogenous(params: &GameParams, alpha_z: f64, z: f64) -> Result<EquilibriumSet> {
    Environment::exogenous(alpha_z, z)?;
    public_signal_equilibria(params, alpha_z, z, &Tolerances::default())
}

/// Threshold equilibria when the public signal is a market price of precision α_x²/(γσ_ε)².
pub fn solve_endogenous(params: &GameParams, gamma: f64, sigma_eps: f64, z: f64) -> Result<EquilibriumSet> {
    Environment::market(gamma, sigma_eps, z)?;
    let alpha_z = market_precision(params.alpha_x(), gamma, sigma_eps);
    public_signal_equilibria(params, alpha_z, z, &Tolerances::default())
}

/// Threshold equilibria in any environment at its realized signal.
pub fn solve(params: &GameParams, env: &Environment) -> Result<EquilibriumSet> {
    match *env {
        Environment::Baseline => solve_baseline(params),
        Environment::ExogenousSignal { alpha_z, z_value } => solve_exogenous(params, alpha_z, z_value),
        Environment::EndogenousMarket { gamma, sigma_eps, z_value } => {
            solve_endogenous(params, gamma, sigma_eps, z_value)
        }
        Environment::ActionSignal { sigma_eps, s_value } => {
            actions::solve_action(params, &actions::ActionSignalConfig::new(params, sigma_eps, s_value)?)
        }
    }
}

/// √((√α_x/α_p)² + σ_μ²) against 1/√(2π).
pub fn uniqueness_baseline(params: &GameParams) -> UniquenessReport {
    let relative = params.alpha_x().sqrt() / params.alpha_p();
    let sigma2 = params.sigma_mu() * params.sigma_mu();
    UniquenessReport::from_lhs((relative.powi(2) + sigma2).sqrt())
}

/// √((√α_x/(α_p+α_z))² + σ_μ²/(1+α_z/α_p)²) against 1/√(2π). Reduces exactly to
/// [`uniqueness_baseline`] at `alpha_z = 0`.
pub fn uniqueness_exogenous(params: &GameParams, alpha_z: f64) -> UniquenessReport {
    let relative = params.alpha_x().sqrt() / (params.alpha_p() + alpha_z);
    let sigma2 = params.sigma_mu() * params.sigma_mu();
    let damping = (1.0 + alpha_z / params.alpha_p()).powi(2);
    UniquenessReport::from_lhs((relative.powi(2) + sigma2 / damping).sqrt())
}

/// The exogenous-signal condition at the market-implied precision α_x²/(γσ_ε)².
pub fn uniqueness_endogenous(params: &GameParams, gamma: f64, sigma_eps: f64) -> UniquenessReport {
    uniqueness_exogenous(params, market_precision(params.alpha_x(), gamma, sigma_eps))
}

/// The threshold uniqueness condition that applies to `env`.
pub fn uniqueness(params: &GameParams, env: &Environment) -> Result<UniquenessReport> {
    Ok(match *env {
        Environment::Baseline => uniqueness_baseline(params),
        Environment::ExogenousSignal { alpha_z, .. } => uniqueness_exogenous(params, alpha_z),
        Environment::EndogenousMarket { gamma, sigma_eps, .. } => uniqueness_endogenous(params, gamma, sigma_eps),
        Environment::ActionSignal { sigma_eps, s_value } => {
            let cfg = actions::ActionSignalConfig::new(params, sigma_eps, s_value)?;
            actions::threshold_uniqueness_action(params, &cfg)
        }
    })
}

/// Composite fixed point of `env` at its realized signal.
pub fn fixed_point(params: &GameParams, env: &Environment) -> Result<ProbitFixedPoint> {
    match *env {
        Environment::Baseline => public_signal_fixed_point(params, 0.0, 0.0),
        Environment::ExogenousSignal { alpha_z, z_value } => public_signal_fixed_point(params, alpha_z, z_value),
        Environment::EndogenousMarket { gamma, sigma_eps, z_value } => {
            public_signal_fixed_point(params, market_precision(params.alpha_x(), gamma, sigma_eps), z_value)
        }
        Environment::ActionSignal { sigma_eps, s_value } => {
            actions::action_fixed_point(params, &actions::ActionSignalConfig::new(params, sigma_eps, s_value)?)
        }
    }
}
