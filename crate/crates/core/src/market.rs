//! CARA-normal asset market whose price partially reveals θ.
//!
//! Traders with risk aversion γ see x_i, hold prior mean μ_i, and condition on the
//! price. Noise supply σ_ε·ε keeps the price from being fully revealing. The linear
//! guess P = η₁θ + η₂ε + intercept is self-consistent with η₁/η₂ = −α_x/(γσ_ε), so
//! the price is a public signal Z = θ − (γσ_ε/α_x)ε of precision α_x²/(γσ_ε)².

use serde::Serialize;

use crate::error::{domain, Result};
use crate::model::{market_precision, GameParams};
use crate::numerics::QuadratureRule;

/// Price loadings of the linear rational-expectations equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketEquilibrium {
    pub eta1: f64,
    pub eta2: f64,
    pub intercept: f64,
    pub alpha_z: f64,
}

impl MarketEquilibrium {
    pub fn price(&self, theta: f64, eps: f64) -> f64 {
        self.eta1 * theta + self.eta2 * eps + self.intercept
    }

    /// The public signal (P − intercept)/η₁ = θ + (η₂/η₁)ε extracted from a price.
    pub fn signal(&self, price: f64) -> f64 {
        (price - self.intercept) / self.eta1
    }
}

pub fn solve_market(params: &GameParams, gamma: f64, sigma_eps: f64) -> Result<MarketEquilibrium> {
    if !(gamma > 0.0 && gamma.is_finite()) || !(sigma_eps > 0.0 && sigma_eps.is_finite()) {
        return Err(domain(format!("gamma and sigma_eps must be positive, got {gamma}, {sigma_eps}")));
    }
    let ax = params.alpha_x();
    if ax <= 0.0 {
        return Err(domain("alpha_x = 0: the price carries no information about theta"));
    }
    let alpha_z = market_precision(ax, gamma, sigma_eps);
    let alpha = ax + params.alpha_p() + alpha_z;
    let eta1 = (ax + alpha_z) / alpha;
    Ok(MarketEquilibrium {
        eta1,
        eta2: -(gamma * sigma_eps / ax) * eta1,
        intercept: params.alpha_p() * params.mu_mean() / alpha,
        alpha_z,
    })
}

/// CARA demand ((α_x/α)x + (α_p/α)μ + (α_z/α)z − P)/(γ/α).
pub fn demand(x_i: f64, mu: f64, z: f64, price: f64, params: &GameParams, gamma: f64, alpha_z: f64) -> f64 {
    let alpha = params.alpha_x() + params.alpha_p() + alpha_z;
    (params.alpha_x() * x_i + params.alpha_p() * mu + alpha_z * z - alpha * price) / gamma
}

/// Aggregate demand minus noise supply σ_ε·ε at the equilibrium price; zero when `me`
/// clears the market.
pub fn clearing_residual(
    theta: f64,
    eps: f64,
    me: &MarketEquilibrium,
    params: &GameParams,
    gamma: f64,
    sigma_eps: f64,
) -> f64 {
    let price = me.price(theta, eps);
    let z = me.signal(price);
    demand(theta, params.mu_mean(), z, price, params, gamma, me.alpha_z) - sigma_eps * eps
}

/// Aggregate demand integrated over the trader population, x ~ N(θ, 1/α_x) and
/// μ ~ N(E[μ], σ_μ²), with a tensor Gauss–Hermite rule.
pub fn aggregate_demand_quadrature(
    theta: f64,
    eps: f64,
    me: &MarketEquilibrium,
    params: &GameParams,
    gamma: f64,
    rule: &QuadratureRule,
) -> f64 {
    let price = me.price(theta, eps);
    let z = me.signal(price);
    let sd_x = params.sigma_x().unwrap_or(0.0);
    rule.expect_normal(theta, sd_x, |x| {
        rule.expect_normal(params.mu_mean(), params.sigma_mu(), |mu| demand(x, mu, z, price, params, gamma, me.alpha_z))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::uniqueness_endogenous;
    use crate::numerics::gauss_hermite;
    use rand::{Rng, SeedableRng};

    fn game(ax: f64, ap: f64, sm: f64, mean: f64) -> GameParams {
        GameParams::new(0.5, ax, ap, sm, mean).unwrap()
    }

    #[test]
    fn seven_sevenths_example() {
        let me = solve_market(&game(2.0, 1.0, 0.0, 0.0), 1.0, 1.0).unwrap();
        assert_eq!(me.alpha_z, 4.0);
        assert!((me.eta1 - 6.0 / 7.0).abs() < 1e-15);
        assert!((me.eta2 + 3.0 / 7.0).abs() < 1e-15);
        assert_eq!(me.intercept, 0.0);
        assert!((me.eta1 / me.eta2 + 2.0).abs() < 1e-12);
    }

    #[test]
    fn intercept_from_prior_level() {
        let me = solve_market(&game(1.0, 1.0, 0.0, 1.0), 1.0, 1.0).unwrap();
        assert!((me.intercept - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_uninformative_traders() {
        assert!(solve_market(&game(0.0, 1.0, 1.0, 0.0), 1.0, 1.0).is_err());
        assert!(solve_market(&game(1.0, 1.0, 1.0, 0.0), 0.0, 1.0).is_err());
        assert!(solve_market(&game(1.0, 1.0, 1.0, 0.0), 1.0, -2.0).is_err());
    }

    #[test]
    fn demand_examples() {
        let p = game(1.0, 1.0, 0.0, 0.0);
        assert!((demand(3.0, 0.0, 0.0, 0.0, &p, 1.0, 1.0) - 3.0).abs() < 1e-15);
        // Posterior mean 1.0 equals the price.
        assert!(demand(1.0, 1.0, 1.0, 1.0, &p, 2.0, 1.0).abs() < 1e-15);
        let (x, mu, z, pr) = (0.4, -1.3, 2.2, 0.7);
        let lam = 3.5;
        let a = demand(lam * x, lam * mu, lam * z, lam * pr, &p, 0.8, 1.7);
        let b = lam * demand(x, mu, z, pr, &p, 0.8, 1.7);
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn signal_recovery_and_clearing() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let p = game(1.7, 0.6, 0.8, 0.9);
        let (gamma, sigma_eps) = (0.7, 1.9);
        let me = solve_market(&p, gamma, sigma_eps).unwrap();
        for _ in 0..1000 {
            let (theta, eps) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let z = me.signal(me.price(theta, eps));
            assert!((z - (theta - gamma * sigma_eps / 1.7 * eps)).abs() < 1e-12);
            assert!(clearing_residual(theta, eps, &me, &p, gamma, sigma_eps).abs() < 1e-10);
        }
        assert_eq!(
            clearing_residual(
                0.0,
                0.0,
                &solve_market(&game(1.0, 1.0, 0.0, 0.0), 1.0, 1.0).unwrap(),
                &game(1.0, 1.0, 0.0, 0.0),
                1.0,
                1.0
            ),
            0.0
        );
    }

    #[test]
    fn perturbed_loading_does_not_clear() {
        let p = game(2.0, 1.0, 0.3, 0.2);
        let mut me = solve_market(&p, 1.0, 1.0).unwrap();
        me.eta1 *= 1.01;
        assert!(clearing_residual(0.8, -0.4, &me, &p, 1.0, 1.0).abs() > 1e-4);
    }

    #[test]
    fn precision_matches_uniqueness_condition() {
        let p = game(3.0, 2.0, 0.5, 0.1);
        let me = solve_market(&p, 0.9, 1.3).unwrap();
        let direct = crate::equilibria::uniqueness_exogenous(&p, me.alpha_z);
        assert_eq!(uniqueness_endogenous(&p, 0.9, 1.3), direct);
        let doubled = solve_market(&p, 0.9, 2.6).unwrap();
        assert!((doubled.alpha_z * 4.0 - me.alpha_z).abs() <= 1e-15 * me.alpha_z);
    }

    #[test]
    fn quadrature_aggregate_matches_closed_form() {
        let rule = gauss_hermite(16).unwrap();
        let p = game(1.2, 0.7, 1.4, -0.3);
        let me = solve_market(&p, 1.5, 0.6).unwrap();
        for (theta, eps) in [(0.3, 0.2), (-1.0, 1.5), (2.0, -0.7)] {
            let q = aggregate_demand_quadrature(theta, eps, &me, &p, 1.5, &rule);
            assert!((q - 0.6 * eps).abs() < 1e-8, "{q}");
        }
    }
}
