use crate::error::{domain, Result};
use crate::model::{belief_aggregate, Environment, GameParams};
use crate::numerics::{std_normal_cdf, std_normal_quantile, QuadratureRule, INV_SQRT_2PI};

fn require_private_signal(params: &GameParams) -> Result<()> {
    if params.alpha_x() <= 0.0 {
        return Err(domain("the prior-explicit form needs alpha_x > 0"));
    }
    Ok(())
}

/// Attack share at θ* from the aggregated closed form Φ(√α_ψ(ψ* − (α_x/α)θ* − (α_p/α)E[μ]))
/// with ψ* = θ* − Φ⁻¹(c)/√α.
pub fn cmc_closed_form(theta_star: f64, params: &GameParams) -> Result<f64> {
    let agg = belief_aggregate(params, &Environment::Baseline)?;
    let psi_star = theta_star - std_normal_quantile(params.cost())? / agg.alpha.sqrt();
    Ok(std_normal_cdf(agg.alpha_psi.sqrt() * (psi_star - agg.weight_x * theta_star - agg.mean_shift)))
}

/// ∫Φ(√α_x(x*(μ) − θ*))φ(μ)dμ with x*(μ) = −Φ⁻¹(c)√α/α_x + θ*α/α_x − (α_p/α_x)μ.
pub fn cmc_prior_integral(theta_star: f64, params: &GameParams, rule: &QuadratureRule) -> Result<f64> {
    require_private_signal(params)?;
    let (ax, ap) = (params.alpha_x(), params.alpha_p());
    let alpha = ax + ap;
    let level = -std_normal_quantile(params.cost())? * alpha.sqrt() / ax + theta_star * alpha / ax;
    Ok(rule.expect_normal(params.mu_mean(), params.sigma_mu(), |mu| {
        let x_star = level - ap / ax * mu;
        std_normal_cdf(ax.sqrt() * (x_star - theta_star))
    }))
}

/// E[e^{−tz²}] for z ~ N(e_z, 1): (1+2t)^{−1/2}·exp(−e_z²t/(1+2t)).
pub fn mgf_noncentral_chi2(t: f64, e_z: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(domain(format!("t must be non-negative, got {t}")));
    }
    let s = 1.0 + 2.0 * t;
    Ok(s.sqrt().recip() * (-e_z * e_z * t / s).exp())
}

/// E[e^{−tz²}] for z ~ N(e_z, 1) by direct quadrature.
pub fn mgf_quadrature(t: f64, e_z: f64, rule: &QuadratureRule) -> f64 {
    rule.expect_normal(e_z, 1.0, |z| (-t * z * z).exp())
}

/// Mean of y(μ) = −Φ⁻¹(c)√α/α_x + θ*α_p/α_x − (α_p/α_x)μ.
fn y_level(theta_star: f64, params: &GameParams) -> Result<f64> {
    let (ax, ap) = (params.alpha_x(), params.alpha_p());
    Ok(-std_normal_quantile(params.cost())? * (ax + ap).sqrt() / ax + theta_star * ap / ax)
}

/// (α_p/√α_x)·(2π)^{−1/2} and the dispersion ratio σ_μα_p/√α_x.
fn scale_and_ratio(params: &GameParams) -> (f64, f64) {
    let root_ax = params.alpha_x().sqrt();
    (params.alpha_p() / root_ax * INV_SQRT_2PI, params.sigma_mu() * params.alpha_p() / root_ax)
}

/// Left side of the prior-explicit uniqueness condition in closed form:
/// (α_p/√α_x)(2π)^{−1/2}(1+r²)^{−1/2}·exp(−½(√α_x E[y])²/(1+r²)), r = σ_μα_p/√α_x.
pub fn uniqueness_lhs_appendix_d(theta_star: f64, params: &GameParams) -> Result<f64> {
    require_private_signal(params)?;
    let e_y = y_level(theta_star, params)? - params.alpha_p() / params.alpha_x() * params.mu_mean();
    let (scale, ratio) = scale_and_ratio(params);
    let spread = 1.0 + ratio * ratio;
    Ok(scale / spread.sqrt() * (-0.5 * params.alpha_x() * e_y * e_y / spread).exp())
}

/// The same left side by quadrature of (α_p/√α_x)(2π)^{−1/2}∫exp(−½α_x y(μ)²)φ(μ)dμ.
pub fn uniqueness_lhs_quadrature(theta_star: f64, params: &GameParams, rule: &QuadratureRule) -> Result<f64> {
    require_private_signal(params)?;
    let level = y_level(theta_star, params)?;
    let slope = params.alpha_p() / params.alpha_x();
    let (scale, _) = scale_and_ratio(params);
    Ok(scale
        * rule.expect_normal(params.mu_mean(), params.sigma_mu(), |mu| {
            let y = level - slope * mu;
            (-0.5 * params.alpha_x() * y * y).exp()
        }))
}

/// Supremum over θ* of the left side, attained where E[y] = 0.
pub fn uniqueness_lhs_supremum(params: &GameParams) -> Result<f64> {
    require_private_signal(params)?;
    let (scale, ratio) = scale_and_ratio(params);
    Ok(scale / (1.0 + ratio * ratio).sqrt())
}
