//! Agents observe the aggregate attack through S = Φ⁻¹(A) + σ_ε·ε.
//!
//! For a given realization S the threshold fixed point again has the probit form
//! y = a + b·Φ(y) (with y = Φ⁻¹(θ*)), so threshold equilibria are enumerated by the
//! same exact solver as the other environments. In equilibrium S is equivalent to a
//! public signal Z(S) about θ; several S can map to the same Z when Z is not
//! monotone in S, which is multiplicity in strategies.

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibria::{check_root_count, ProbitFixedPoint};
use crate::error::{domain, Error, Result};
use crate::model::{
    action_precision, belief_aggregate, BeliefAggregate, Environment, Equilibrium, EquilibriumSet, GameParams,
    UniquenessReport,
};
use crate::numerics::{enumerate_roots, std_normal_cdf, std_normal_pdf, std_normal_quantile, Tolerances, INV_SQRT_2PI};

/// Denominator magnitude of dZ/dS below which the implicit function is treated as singular.
pub const SINGULAR_DENOMINATOR: f64 = 1e-14;

/// Attack-revealing signal parameters with the implied precision of Z(S).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionSignalConfig {
    pub sigma_eps: f64,
    /// α_x²/(σ_ε²(α_x + α_p²σ_μ²)).
    pub alpha_z: f64,
    pub s_value: f64,
}

impl ActionSignalConfig {
    pub fn new(params: &GameParams, sigma_eps: f64, s_value: f64) -> Result<Self> {
        Environment::actions(sigma_eps, s_value)?;
        if params.alpha_x() <= 0.0 {
            return Err(domain("the attack-revealing signal needs alpha_x > 0"));
        }
        Ok(Self { sigma_eps, alpha_z: action_precision(params, sigma_eps), s_value })
    }

    pub fn with_signal(self, s_value: f64) -> Self {
        Self { s_value, ..self }
    }

    pub fn environment(&self) -> Environment {
        Environment::ActionSignal { sigma_eps: self.sigma_eps, s_value: self.s_value }
    }
}

/// Grid of signal realizations used to trace θ*(S).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for SignalGrid {
    fn default() -> Self {
        Self { lo: -10.0, hi: 10.0, points: 2001 }
    }
}

impl SignalGrid {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points.max(2);
        let step = (self.hi - self.lo) / (n - 1) as f64;
        (0..n).map(|i| if i + 1 == n { self.hi } else { self.lo + step * i as f64 }).collect()
    }
}

struct ActionTerms {
    agg: BeliefAggregate,
    /// (1/√α_ψ)(α_x+α_z)/α_x, the loading on Φ⁻¹(θ).
    probit_loading: f64,
    /// ((α_x+α_z)α_p/(α_x α))·E[μ].
    prior_term: f64,
    /// (α_z/α_x)(1/√α_ψ)·S.
    signal_term: f64,
    cost_quantile: f64,
}

fn terms(params: &GameParams, cfg: &ActionSignalConfig) -> Result<ActionTerms> {
    let agg = belief_aggregate(params, &cfg.environment())?;
    let (ax, az) = (params.alpha_x(), cfg.alpha_z);
    let inv_root_psi = agg.alpha_psi.sqrt().recip();
    Ok(ActionTerms {
        probit_loading: inv_root_psi * (ax + az) / ax,
        prior_term: (ax + az) * params.alpha_p() / (ax * agg.alpha) * params.mu_mean(),
        signal_term: az / ax * inv_root_psi * cfg.s_value,
        cost_quantile: std_normal_quantile(params.cost())?,
        agg,
    })
}

/// Φ(√α((α_p/α)θ − L·Φ⁻¹(θ) − prior + signal)) − c, zero at a threshold equilibrium.
pub fn residual_action(theta: f64, params: &GameParams, cfg: &ActionSignalConfig) -> Result<f64> {
    let t = terms(params, cfg)?;
    let y = std_normal_quantile(theta)?;
    let inner = t.agg.weight_p * theta - t.probit_loading * y - t.prior_term + t.signal_term;
    Ok(std_normal_cdf(t.agg.alpha.sqrt() * inner) - params.cost())
}

/// The threshold condition in probit coordinates, y = a + b·Φ(y).
pub fn action_fixed_point(params: &GameParams, cfg: &ActionSignalConfig) -> Result<ProbitFixedPoint> {
    let t = terms(params, cfg)?;
    let rhs = -t.prior_term + t.signal_term - t.cost_quantile / t.agg.alpha.sqrt();
    Ok(ProbitFixedPoint { intercept: rhs / t.probit_loading, slope: t.agg.weight_p / t.probit_loading })
}

/// ψ* = Φ⁻¹(θ*)/√α_ψ + (α_x/α)θ* + (α_p/α)E[μ], from the critical mass condition.
fn psi_from_probit(y: f64, agg: &BeliefAggregate) -> f64 {
    y / agg.alpha_psi.sqrt() + agg.weight_x * std_normal_cdf(y) + agg.mean_shift
}

pub fn solve_action(params: &GameParams, cfg: &ActionSignalConfig) -> Result<EquilibriumSet> {
    solve_action_with(params, cfg, &Tolerances::default())
}

pub fn solve_action_with(params: &GameParams, cfg: &ActionSignalConfig, tol: &Tolerances) -> Result<EquilibriumSet> {
    let fixed_point = action_fixed_point(params, cfg)?;
    let agg = belief_aggregate(params, &cfg.environment())?;
    let roots = fixed_point.roots(tol)?;
    check_root_count(roots.len())?;
    Ok(EquilibriumSet {
        equilibria: roots
            .into_iter()
            .map(|r| Equilibrium {
                theta_star: std_normal_cdf(r.y),
                psi_star: psi_from_probit(r.y, &agg),
                probit: r.y,
                slope_at_root: fixed_point.map_slope(r.y),
                degenerate: r.degenerate,
            })
            .collect(),
    })
}

/// Threshold equilibria at every S on the grid, computed in parallel.
pub fn trace_thresholds(params: &GameParams, sigma_eps: f64, grid: &SignalGrid) -> Result<Vec<(f64, EquilibriumSet)>> {
    let base = ActionSignalConfig::new(params, sigma_eps, 0.0)?;
    grid.values().into_par_iter().map(|s| solve_action(params, &base.with_signal(s)).map(|set| (s, set))).collect()
}

/// ((α_x+α_z)/α_x)·√((√α_x/α_p)² + σ_μ²) against 1/√(2π).
pub fn threshold_uniqueness_action(params: &GameParams, cfg: &ActionSignalConfig) -> UniquenessReport {
    let ax = params.alpha_x();
    let relative = ax.sqrt() / params.alpha_p();
    let sigma2 = params.sigma_mu() * params.sigma_mu();
    UniquenessReport::from_lhs((ax + cfg.alpha_z) / ax * (relative.powi(2) + sigma2).sqrt())
}

/// Z(S) = (α/α_x)ψ*(S) − (α/α_x)(1/√α_ψ)·S.
pub fn equivalent_signal(psi_star: f64, s: f64, params: &GameParams, cfg: &ActionSignalConfig) -> Result<f64> {
    let agg = belief_aggregate(params, &cfg.environment())?;
    let scale = agg.alpha / params.alpha_x();
    Ok(scale * psi_star - scale * s / agg.alpha_psi.sqrt())
}

/// S = √α_ψ(ψ* − (α_x/α)θ − (α_p/α)E[μ]) + σ_ε·ε, the realized signal given the state.
pub fn action_signal(
    theta: f64,
    eps: f64,
    psi_star: f64,
    params: &GameParams,
    cfg: &ActionSignalConfig,
) -> Result<f64> {
    let agg = belief_aggregate(params, &cfg.environment())?;
    Ok(agg.alpha_psi.sqrt() * (psi_star - agg.weight_x * theta - agg.mean_shift) + cfg.sigma_eps * eps)
}

/// dZ/dS along the threshold branch through θ*, in terms of y = Φ⁻¹(θ*).
pub fn dzds_at_probit(y: f64, params: &GameParams, cfg: &ActionSignalConfig) -> Result<f64> {
    let (numerator, denominator) = dzds_parts(std_normal_pdf(y), params, cfg);
    if denominator.abs() < SINGULAR_DENOMINATOR {
        return Err(Error::Singularity(format!("dZ/dS denominator {denominator:e} at probit {y}")));
    }
    Ok(numerator / denominator)
}

/// dZ/dS = [−(α_p+α_z)φ + √(α_x+α_p²σ_μ²)] / [φα_pα_x/√(α_x+α_p²σ_μ²) − (α_x+α_z)]
/// with φ = φ(Φ⁻¹(θ*)).
pub fn dzds(theta: f64, params: &GameParams, cfg: &ActionSignalConfig) -> Result<f64> {
    dzds_at_probit(std_normal_quantile(theta)?, params, cfg)
}

fn dzds_parts(density: f64, params: &GameParams, cfg: &ActionSignalConfig) -> (f64, f64) {
    let (ax, ap, az) = (params.alpha_x(), params.alpha_p(), cfg.alpha_z);
    let spread = params.belief_spread().sqrt();
    let numerator = -(ap + az) * density + spread;
    let denominator = density * ap * ax / spread - (ax + az);
    (numerator, denominator)
}

/// Analytic dZ/dS next to a central difference of Z(S) through the solved threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DzdsCheck {
    pub s: f64,
    pub theta_star: f64,
    pub analytic: f64,
    pub finite_difference: f64,
}

impl DzdsCheck {
    pub fn relative_error(&self) -> f64 {
        (self.analytic - self.finite_difference).abs() / (1.0 + self.analytic.abs())
    }
}

/// Z(S) and Φ⁻¹(θ*(S)) when the threshold at S is unique, solved to full precision.
fn unique_branch(params: &GameParams, cfg: &ActionSignalConfig) -> Result<Option<(f64, f64)>> {
    let tol = Tolerances { x_tol: 0.0, ..Tolerances::default() };
    let set = solve_action_with(params, cfg, &tol)?;
    if set.len() != 1 || set.degenerate() {
        return Ok(None);
    }
    let eq = set.equilibria[0];
    Ok(Some((equivalent_signal(eq.psi_star, cfg.s_value, params, cfg)?, eq.probit)))
}

/// Compares [`dzds`] at S = `cfg.s_value` with (Z(S+h) − Z(S−h))/(2h). `None` when
/// θ*(S) is not locally unique, since Z(S) is then not a function of S.
pub fn dzds_check(params: &GameParams, cfg: &ActionSignalConfig, h: f64) -> Result<Option<DzdsCheck>> {
    let s = cfg.s_value;
    let (Some((_, y)), Some((z_up, _)), Some((z_down, _))) = (
        unique_branch(params, cfg)?,
        unique_branch(params, &cfg.with_signal(s + h))?,
        unique_branch(params, &cfg.with_signal(s - h))?,
    ) else {
        return Ok(None);
    };
    Ok(Some(DzdsCheck {
        s,
        theta_star: std_normal_cdf(y),
        analytic: dzds_at_probit(y, params, cfg)?,
        finite_difference: (z_up - z_down) / (2.0 * h),
    }))
}

/// Closed-form sufficient conditions for uniqueness of S(Z̄), and the numerical
/// supremum of dZ/dS over θ* ∈ (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyReport {
    /// sup of dZ/dS; +∞ when the denominator vanishes inside (0, 1).
    pub dzds_max: f64,
    pub e11_lhs: f64,
    pub e12_lhs: f64,
    pub condition_e11: bool,
    pub condition_e12: bool,
    pub strategies_unique: bool,
}

/// Points of the uniform probit grid used for the dZ/dS supremum.
pub const DZDS_GRID_POINTS: usize = 999;
const DZDS_GRID_HALF_WIDTH: f64 = 8.0;

pub fn strategy_uniqueness(params: &GameParams, cfg: &ActionSignalConfig) -> StrategyReport {
    let (ax, ap, az) = (params.alpha_x(), params.alpha_p(), cfg.alpha_z);
    let sigma2 = params.sigma_mu() * params.sigma_mu();
    let e11_lhs = (ax / (ap + az).powi(2) + sigma2 / (1.0 + az / ap)).sqrt();
    let e12_lhs = ((ax + az).powi(2) / (ax * ap * ap) + sigma2 * (ax + az).powi(2) / (ax * ax)).sqrt();
    let condition_e11 = INV_SQRT_2PI <= e11_lhs;
    let condition_e12 = INV_SQRT_2PI <= e12_lhs;
    StrategyReport {
        dzds_max: dzds_supremum(params, cfg),
        e11_lhs,
        e12_lhs,
        condition_e11,
        condition_e12,
        strategies_unique: condition_e11 && condition_e12,
    }
}

fn dzds_supremum(params: &GameParams, cfg: &ActionSignalConfig) -> f64 {
    // The denominator peaks at y = 0; if it reaches zero the branch has a pole.
    let (_, peak_denominator) = dzds_parts(INV_SQRT_2PI, params, cfg);
    if peak_denominator > -SINGULAR_DENOMINATOR {
        return f64::INFINITY;
    }
    let (tail_num, tail_den) = dzds_parts(0.0, params, cfg);
    let step = 2.0 * DZDS_GRID_HALF_WIDTH / (DZDS_GRID_POINTS - 1) as f64;
    (0..DZDS_GRID_POINTS)
        .map(|i| {
            let (n, d) = dzds_parts(std_normal_pdf(-DZDS_GRID_HALF_WIDTH + step * i as f64), params, cfg);
            n / d
        })
        .fold(tail_num / tail_den, f64::max)
}

/// All S on the grid's span with Z(S) = `z_bar`, when θ*(S) is single-valued there.
///
/// Returns a domain error if some S on the grid admits several threshold equilibria,
/// since Z(S) is then not a function of S.
pub fn strategy_solutions(
    params: &GameParams,
    sigma_eps: f64,
    z_bar: f64,
    grid: &SignalGrid,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let base = ActionSignalConfig::new(params, sigma_eps, 0.0)?;
    if !threshold_uniqueness_action(params, &base).unique_for_all {
        return Err(domain("threshold equilibria are not unique for every S; Z(S) is multi-valued"));
    }
    let z_minus_target = |s: f64| -> f64 {
        let cfg = base.with_signal(s);
        solve_action(params, &cfg)
            .and_then(|set| equivalent_signal(set.equilibria[0].psi_star, s, params, &cfg))
            .map_or(f64::NAN, |z| z - z_bar)
    };
    Ok(enumerate_roots(z_minus_target, (grid.lo, grid.hi), grid.points, tol).roots)
}
