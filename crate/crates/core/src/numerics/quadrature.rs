use std::f64::consts::{PI, SQRT_2};

use crate::error::{domain, Result};

pub const MIN_HERMITE_ORDER: usize = 2;
pub const MAX_HERMITE_ORDER: usize = 256;

/// A Gauss–Hermite rule for integrals of the form ∫ f(t) e^{−t²} dt.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫ f(t) e^{−t²} dt.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }

    /// E[f(X)] for X ~ N(mean, sd²). With `sd == 0` this is `f(mean)` exactly.
    pub fn expect_normal<F: Fn(f64) -> f64>(&self, mean: f64, sd: f64, f: F) -> f64 {
        if sd == 0.0 {
            return f(mean);
        }
        let scale = SQRT_2 * sd;
        self.integrate(|t| f(mean + scale * t)) / PI.sqrt()
    }
}

/// Builds the `order`-point Gauss–Hermite rule. Nodes are the eigenvalues of the
/// Hermite Jacobi matrix, isolated by Sturm-count bisection; weights come from the
/// Christoffel sum 1/Σ p_k(x)² over the orthonormal Hermite polynomials.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if !(MIN_HERMITE_ORDER..=MAX_HERMITE_ORDER).contains(&order) {
        return Err(domain(format!(
            "Gauss-Hermite order must lie in [{MIN_HERMITE_ORDER}, {MAX_HERMITE_ORDER}], got {order}"
        )));
    }
    let n = order;
    let off_diag_sq: Vec<f64> = (1..n).map(|k| k as f64 / 2.0).collect();
    // Number of eigenvalues strictly below x.
    let count_below = |x: f64| {
        let mut d = -x;
        let mut count = usize::from(d < 0.0);
        for &b2 in &off_diag_sq {
            if d == 0.0 {
                d = f64::MIN_POSITIVE;
            }
            d = -x - b2 / d;
            count += usize::from(d < 0.0);
        }
        count
    };
    let limit = (2.0 * n as f64 + 1.0).sqrt() + 1.0;
    let mut nodes = vec![0.0; n];
    for i in 0..n / 2 {
        let (mut lo, mut hi) = (-limit, 0.0);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if count_below(mid) > i {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        nodes[i] = 0.5 * (lo + hi);
        nodes[n - 1 - i] = -nodes[i];
    }

    let pi_m4 = PI.powf(-0.25);
    let weights = nodes
        .iter()
        .map(|&x| {
            let (mut p1, mut p2) = (pi_m4, 0.0);
            let mut sum = p1 * p1;
            for j in 1..n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = x * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                sum += p1 * p1;
            }
            1.0 / sum
        })
        .collect();
    Ok(QuadratureRule { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::std_normal_cdf;

    /// Γ(k + ½) = ∫ t^{2k} e^{−t²} dt.
    fn even_moment(k: u32) -> f64 {
        (1..=k).fold(PI.sqrt(), |acc, j| acc * (j as f64 - 0.5))
    }

    #[test]
    fn two_point_rule() {
        let rule = gauss_hermite(2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((rule.nodes()[0] + r).abs() < 1e-15);
        assert!((rule.nodes()[1] - r).abs() < 1e-15);
        for &wt in rule.weights() {
            assert!((wt - PI.sqrt() / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_unsupported_orders() {
        for order in [0, 1, 257, 1000] {
            assert!(gauss_hermite(order).is_err());
        }
    }

    #[test]
    fn weights_sum_and_nodes_increase() {
        for order in [2, 3, 7, 8, 32, 64, 101, 128, 200, 256] {
            let rule = gauss_hermite(order).unwrap();
            assert_eq!(rule.order(), order);
            let total: f64 = rule.weights().iter().sum();
            assert!((total - PI.sqrt()).abs() <= 1e-12, "order {order}: {total}");
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            assert!(rule.nodes().windows(2).all(|p| p[0] < p[1]), "order {order}");
        }
    }

    #[test]
    fn polynomial_exactness() {
        for order in [2usize, 3, 5, 8, 16, 33, 64] {
            let rule = gauss_hermite(order).unwrap();
            let max_deg = (2 * order - 1).min(40) as u32;
            for deg in 0..=max_deg {
                let got = rule.integrate(|t| t.powi(deg as i32));
                let want = if deg % 2 == 1 { 0.0 } else { even_moment(deg / 2) };
                let scale = rule.integrate(|t| t.abs().powi(deg as i32));
                assert!((got - want).abs() <= 1e-13 * scale.max(1.0), "order {order} deg {deg}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn second_moment_order_8() {
        let rule = gauss_hermite(8).unwrap();
        assert!((rule.integrate(|t| t * t) - PI.sqrt() / 2.0).abs() <= 1e-12);
    }

    #[test]
    fn mean_of_cdf_is_half() {
        let rule = gauss_hermite(64).unwrap();
        let got = rule.integrate(std_normal_cdf);
        assert!((got - PI.sqrt() / 2.0).abs() <= 1e-10);
    }

    #[test]
    fn expect_normal_point_mass() {
        let rule = gauss_hermite(16).unwrap();
        assert_eq!(rule.expect_normal(1.25, 0.0, |m| m * 3.0), 3.75);
        let var = rule.expect_normal(2.0, 1.5, |m| (m - 2.0).powi(2));
        assert!((var - 2.25).abs() < 1e-12);
    }
}
