//! Game primitives, informational environments, and the Gaussian belief
//! aggregation shared by every solver.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::INV_SQRT_2PI;

/// Primitives of one game instance.
///
/// Precisions are inverse variances: `alpha_x = 1/σ_x²` for the private signal and
/// `alpha_p = 1/σ_p²` for each agent's prior. Prior means are dispersed across the
/// population as N(`mu_mean`, `sigma_mu`²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameParams {
    cost: f64,
    alpha_x: f64,
    alpha_p: f64,
    sigma_mu: f64,
    mu_mean: f64,
}

impl GameParams {
    pub fn new(cost: f64, alpha_x: f64, alpha_p: f64, sigma_mu: f64, mu_mean: f64) -> Result<Self> {
        if !(cost > 0.0 && cost < 1.0) {
            return Err(domain(format!("cost must lie in (0, 1), got {cost}")));
        }
        if !(alpha_x >= 0.0 && alpha_x.is_finite()) {
            return Err(domain(format!("alpha_x must be a finite precision >= 0, got {alpha_x}")));
        }
        if !(alpha_p > 0.0 && alpha_p.is_finite()) {
            return Err(domain(format!("alpha_p must be a finite precision > 0, got {alpha_p}")));
        }
        if !(sigma_mu >= 0.0 && sigma_mu.is_finite()) {
            return Err(domain(format!("sigma_mu must be a finite std >= 0, got {sigma_mu}")));
        }
        if !mu_mean.is_finite() {
            return Err(domain(format!("mu_mean must be finite, got {mu_mean}")));
        }
        Ok(Self { cost, alpha_x, alpha_p, sigma_mu, mu_mean })
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn alpha_x(&self) -> f64 {
        self.alpha_x
    }

    pub fn alpha_p(&self) -> f64 {
        self.alpha_p
    }

    pub fn sigma_mu(&self) -> f64 {
        self.sigma_mu
    }

    pub fn mu_mean(&self) -> f64 {
        self.mu_mean
    }

    /// Private signal noise std, undefined for an uninformative signal.
    pub fn sigma_x(&self) -> Option<f64> {
        (self.alpha_x > 0.0).then(|| self.alpha_x.recip().sqrt())
    }

    /// Prior std σ_p.
    pub fn sigma_p(&self) -> f64 {
        self.alpha_p.recip().sqrt()
    }

    /// α_x + α_p²σ_μ², the variance of α·ψ given θ.
    pub fn belief_spread(&self) -> f64 {
        self.alpha_x + self.alpha_p * self.alpha_p * self.sigma_mu * self.sigma_mu
    }

    pub fn with_cost(self, cost: f64) -> Result<Self> {
        Self::new(cost, self.alpha_x, self.alpha_p, self.sigma_mu, self.mu_mean)
    }

    pub fn with_mu_mean(self, mu_mean: f64) -> Result<Self> {
        Self::new(self.cost, self.alpha_x, self.alpha_p, self.sigma_mu, mu_mean)
    }

    pub fn with_alpha_x(self, alpha_x: f64) -> Result<Self> {
        Self::new(self.cost, alpha_x, self.alpha_p, self.sigma_mu, self.mu_mean)
    }

    pub fn with_alpha_p(self, alpha_p: f64) -> Result<Self> {
        Self::new(self.cost, self.alpha_x, alpha_p, self.sigma_mu, self.mu_mean)
    }

    pub fn with_sigma_mu(self, sigma_mu: f64) -> Result<Self> {
        Self::new(self.cost, self.alpha_x, self.alpha_p, sigma_mu, self.mu_mean)
    }
}

/// The informational setting of the coordination stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Environment {
    /// Private signals and heterogeneous priors only.
    Baseline,
    /// A public signal Z = θ + ε/√α_z of exogenous precision.
    ExogenousSignal { alpha_z: f64, z_value: f64 },
    /// A price that reveals θ with precision α_x²/(γσ_ε)².
    EndogenousMarket { gamma: f64, sigma_eps: f64, z_value: f64 },
    /// A noisy public signal of the aggregate attack, S = Φ⁻¹(A) + σ_ε·ε.
    ActionSignal { sigma_eps: f64, s_value: f64 },
}

impl Environment {
    pub fn exogenous(alpha_z: f64, z_value: f64) -> Result<Self> {
        Self::ExogenousSignal { alpha_z, z_value }.validated()
    }

    pub fn market(gamma: f64, sigma_eps: f64, z_value: f64) -> Result<Self> {
        Self::EndogenousMarket { gamma, sigma_eps, z_value }.validated()
    }

    pub fn actions(sigma_eps: f64, s_value: f64) -> Result<Self> {
        Self::ActionSignal { sigma_eps, s_value }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(domain(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(domain(format!("{name} must be finite, got {v}")))
            }
        };
        match self {
            Self::Baseline => {}
            Self::ExogenousSignal { alpha_z, z_value } => {
                positive("alpha_z", alpha_z)?;
                finite("z", z_value)?;
            }
            Self::EndogenousMarket { gamma, sigma_eps, z_value } => {
                positive("gamma", gamma)?;
                positive("sigma_eps", sigma_eps)?;
                finite("z", z_value)?;
            }
            Self::ActionSignal { sigma_eps, s_value } => {
                positive("sigma_eps", sigma_eps)?;
                finite("s", s_value)?;
            }
        }
        Ok(self)
    }

    /// Short name used in config files and CSV output.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Baseline => "baseline",
            Self::ExogenousSignal { .. } => "exogenous",
            Self::EndogenousMarket { .. } => "market",
            Self::ActionSignal { .. } => "actions",
        }
    }

    /// Precision with which the public signal reveals θ; zero in the baseline.
    pub fn signal_precision(&self, params: &GameParams) -> f64 {
        match *self {
            Self::Baseline => 0.0,
            Self::ExogenousSignal { alpha_z, .. } => alpha_z,
            Self::EndogenousMarket { gamma, sigma_eps, .. } => market_precision(params.alpha_x(), gamma, sigma_eps),
            Self::ActionSignal { sigma_eps, .. } => action_precision(params, sigma_eps),
        }
    }

    /// Realized public signal (Z or S); zero in the baseline.
    pub fn signal_value(&self) -> f64 {
        match *self {
            Self::Baseline => 0.0,
            Self::ExogenousSignal { z_value, .. } | Self::EndogenousMarket { z_value, .. } => z_value,
            Self::ActionSignal { s_value, .. } => s_value,
        }
    }

    /// Same environment with the realized signal replaced.
    pub fn with_signal(self, value: f64) -> Self {
        match self {
            Self::Baseline => Self::Baseline,
            Self::ExogenousSignal { alpha_z, .. } => Self::ExogenousSignal { alpha_z, z_value: value },
            Self::EndogenousMarket { gamma, sigma_eps, .. } => {
                Self::EndogenousMarket { gamma, sigma_eps, z_value: value }
            }
            Self::ActionSignal { sigma_eps, .. } => Self::ActionSignal { sigma_eps, s_value: value },
        }
    }
}

/// α_z = α_x²/(γσ_ε)² revealed by the CARA-normal market price.
pub fn market_precision(alpha_x: f64, gamma: f64, sigma_eps: f64) -> f64 {
    let noise = gamma * sigma_eps;
    alpha_x * alpha_x / (noise * noise)
}

/// α_z = α_x²/(σ_ε²(α_x + α_p²σ_μ²)) carried by the attack-revealing signal.
pub fn action_precision(params: &GameParams, sigma_eps: f64) -> f64 {
    params.alpha_x() * params.alpha_x() / (sigma_eps * sigma_eps * params.belief_spread())
}

/// Posterior precisions and the conditional law of ψ given θ.
///
/// ψ ≡ (α_x/α)x + (α_p/α)μ and ψ | θ ~ N(weight_x·θ + mean_shift, 1/alpha_psi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeliefAggregate {
    /// Total posterior precision α.
    pub alpha: f64,
    /// Cross-sectional precision α_ψ = α²/(α_x + α_p²σ_μ²).
    pub alpha_psi: f64,
    /// Precision of the public signal included in α.
    pub alpha_z: f64,
    /// α_x/α.
    pub weight_x: f64,
    /// α_p/α.
    pub weight_p: f64,
    /// (α_p/α)·E[μ].
    pub mean_shift: f64,
}

pub fn belief_aggregate(params: &GameParams, env: &Environment) -> Result<BeliefAggregate> {
    let alpha_z = env.signal_precision(params);
    let alpha = params.alpha_x() + params.alpha_p() + alpha_z;
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(domain("all precisions are zero"));
    }
    let spread = params.belief_spread();
    if spread.is_nan() || spread <= 0.0 {
        return Err(domain("alpha_x = 0 with sigma_mu = 0 makes psi deterministic; alpha_psi is unbounded"));
    }
    let weight_p = params.alpha_p() / alpha;
    Ok(BeliefAggregate {
        alpha,
        alpha_psi: alpha * alpha / spread,
        alpha_z,
        weight_x: params.alpha_x() / alpha,
        weight_p,
        mean_shift: weight_p * params.mu_mean(),
    })
}

/// The posterior-mean statistic (α_x/α)x + (α_p/α)μ.
pub fn psi_of(x: f64, mu: f64, agg: &BeliefAggregate) -> f64 {
    agg.weight_x * x + agg.weight_p * mu
}

/// One threshold equilibrium (θ*, ψ*).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium {
    pub theta_star: f64,
    pub psi_star: f64,
    /// Φ⁻¹(θ*). Kept alongside θ* because roots in the far tails round to 0 or 1 in θ.
    pub probit: f64,
    /// Slope of the best-response map θ ↦ A(ψ*(θ), θ) at the root; below one is stable.
    pub slope_at_root: f64,
    /// The root is a tangency (double root).
    pub degenerate: bool,
}

/// All threshold equilibria for one parameter point, sorted by θ*.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct EquilibriumSet {
    pub equilibria: Vec<Equilibrium>,
}

impl EquilibriumSet {
    pub fn len(&self) -> usize {
        self.equilibria.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equilibria.is_empty()
    }

    pub fn degenerate(&self) -> bool {
        self.equilibria.iter().any(|e| e.degenerate)
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.equilibria.iter().map(|e| e.theta_star).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Equilibrium> {
        self.equilibria.iter()
    }
}

/// A closed-form uniqueness condition of the form `lhs ≥ 1/√(2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub lhs: f64,
    pub threshold: f64,
    pub unique_for_all: bool,
    pub margin: f64,
}

impl UniquenessReport {
    pub fn from_lhs(lhs: f64) -> Self {
        Self { lhs, threshold: INV_SQRT_2PI, unique_for_all: lhs >= INV_SQRT_2PI, margin: lhs - INV_SQRT_2PI }
    }
}

/// JSON form of a game plus its environment.
///
/// ```json
/// {"cost": 0.5, "alpha_x": 1, "alpha_p": 10, "sigma_mu": 0, "mu_mean": 0.5,
///  "env": {"type": "exogenous", "alpha_z": 20, "z": 0.5}}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub cost: f64,
    pub alpha_x: f64,
    pub alpha_p: f64,
    pub sigma_mu: f64,
    pub mu_mean: f64,
    #[serde(default)]
    pub env: EnvConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum EnvConfig {
    #[default]
    Baseline,
    Exogenous {
        alpha_z: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        z: Option<f64>,
    },
    Market {
        gamma: f64,
        sigma_eps: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        z: Option<f64>,
    },
    Actions {
        sigma_eps: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
}

impl GameConfig {
    pub fn params(&self) -> Result<GameParams> {
        GameParams::new(self.cost, self.alpha_x, self.alpha_p, self.sigma_mu, self.mu_mean)
    }

    /// Builds the environment. With `require_signal`, a missing realized signal is an
    /// error; otherwise it defaults to zero (uniqueness conditions do not depend on it).
    pub fn environment(&self, require_signal: bool) -> Result<Environment> {
        let signal = |v: Option<f64>, key: &str| match (v, require_signal) {
            (Some(v), _) => Ok(v),
            (None, false) => Ok(0.0),
            (None, true) => Err(Error::Config(format!("environment requires the realized signal `{key}`"))),
        };
        match self.env {
            EnvConfig::Baseline => Ok(Environment::Baseline),
            EnvConfig::Exogenous { alpha_z, z } => Environment::exogenous(alpha_z, signal(z, "z")?),
            EnvConfig::Market { gamma, sigma_eps, z } => Environment::market(gamma, sigma_eps, signal(z, "z")?),
            EnvConfig::Actions { sigma_eps, s } => Environment::actions(sigma_eps, signal(s, "s")?),
        }
    }
}
