use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::model::{belief_aggregate, Environment, GameParams};
use crate::numerics::std_normal_cdf;

pub const MIN_AGENTS: u64 = 1_000;

/// Agents per RNG stream. Fixed so results do not depend on the thread count.
const CHUNK: u64 = 1 << 16;

/// A simulated attack fraction compared with the critical mass closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationResult {
    pub attack_fraction_hat: f64,
    pub analytic_attack: f64,
    pub n_agents: u64,
    pub seed: u64,
    /// √(Â(1−Â)/N).
    pub std_error: f64,
    pub psi_mean: f64,
    pub psi_variance: f64,
    pub psi_mean_analytic: f64,
    pub psi_variance_analytic: f64,
}

impl SimulationResult {
    pub fn deviation(&self) -> f64 {
        (self.attack_fraction_hat - self.analytic_attack).abs()
    }

    /// |Â − A| within three standard errors. The band never shrinks below one
    /// agent's share, so a unanimous sample matches an analytic value within 1/N.
    pub fn within_band(&self) -> bool {
        self.deviation() <= 3.0 * self.std_error.max(1.0 / self.n_agents as f64)
    }
}

/// A simulated probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinomialEstimate {
    pub estimate: f64,
    pub analytic: f64,
    pub n: u64,
    pub seed: u64,
    pub std_error: f64,
}

impl BinomialEstimate {
    fn new(hits: u64, n: u64, seed: u64, analytic: f64) -> Self {
        let estimate = hits as f64 / n as f64;
        Self { estimate, analytic, n, seed, std_error: (estimate * (1.0 - estimate) / n as f64).sqrt() }
    }

    pub fn within_band(&self) -> bool {
        (self.estimate - self.analytic).abs() <= 3.0 * self.std_error.max(1.0 / self.n as f64)
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    hits: u64,
    /// Sums of ψ − ψ̄ and (ψ − ψ̄)² around the analytic mean.
    dev: f64,
    dev_sq: f64,
}

impl Tally {
    fn merge(self, other: Self) -> Self {
        Self { hits: self.hits + other.hits, dev: self.dev + other.dev, dev_sq: self.dev_sq + other.dev_sq }
    }
}

/// Runs `draw` over `n` samples split into fixed chunks, one ChaCha stream each.
fn chunked<F>(n: u64, seed: u64, draw: F) -> Tally
where
    F: Fn(&mut ChaCha8Rng) -> (bool, f64) + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let tallies: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let len = CHUNK.min(n - k * CHUNK);
            let mut t = Tally::default();
            for _ in 0..len {
                let (hit, dev) = draw(&mut rng);
                t.hits += u64::from(hit);
                t.dev += dev;
                t.dev_sq += dev * dev;
            }
            t
        })
        .collect();
    tallies.into_iter().fold(Tally::default(), Tally::merge)
}

fn check_count(n: u64) -> Result<()> {
    if n < MIN_AGENTS {
        return Err(domain(format!("need at least {MIN_AGENTS} draws, got {n}")));
    }
    Ok(())
}

/// Draws μ_i ~ N(E[μ], σ_μ²) and x_i = θ + σ_x·ξ_i, attacks iff ψ_i ≤ ψ*, and
/// compares the attacking share with Φ(√α_ψ(ψ* − (α_x/α)θ − (α_p/α)E[μ])).
pub fn simulate_attack(theta: f64, psi_star: f64, params: &GameParams, n: u64, seed: u64) -> Result<SimulationResult> {
    check_count(n)?;
    let alpha = params.alpha_x() + params.alpha_p();
    let (wx, wp) = (params.alpha_x() / alpha, params.alpha_p() / alpha);
    let mean = wx * theta + wp * params.mu_mean();
    let sd_x = params.sigma_x().unwrap_or(0.0);
    let sd_mu = params.sigma_mu();

    let (analytic, variance) = if params.belief_spread() > 0.0 {
        let agg = belief_aggregate(params, &Environment::Baseline)?;
        (std_normal_cdf(agg.alpha_psi.sqrt() * (psi_star - mean)), agg.alpha_psi.recip())
    } else {
        // No private signal and a common prior: every agent holds ψ = E[μ].
        (if mean <= psi_star { 1.0 } else { 0.0 }, 0.0)
    };

    let tally = chunked(n, seed, |rng| {
        let mu = params.mu_mean() + sd_mu * rng.sample::<f64, _>(StandardNormal);
        let x = if sd_x > 0.0 { theta + sd_x * rng.sample::<f64, _>(StandardNormal) } else { theta };
        let psi = wx * x + wp * mu;
        (psi <= psi_star, psi - mean)
    });
    let nf = n as f64;
    let hat = tally.hits as f64 / nf;
    let dev_mean = tally.dev / nf;
    Ok(SimulationResult {
        attack_fraction_hat: hat,
        analytic_attack: analytic,
        n_agents: n,
        seed,
        std_error: (hat * (1.0 - hat) / nf).sqrt(),
        psi_mean: mean + dev_mean,
        psi_variance: (tally.dev_sq / nf - dev_mean * dev_mean) * nf / (nf - 1.0),
        psi_mean_analytic: mean,
        psi_variance_analytic: variance,
    })
}

/// Draws θ_j ~ N(ψ, 1/α) from the posterior and reports the share with θ_j ≤ θ*,
/// against Φ(√α(θ* − ψ)).
pub fn simulate_success_prob(
    psi: f64,
    theta_star: f64,
    params: &GameParams,
    n: u64,
    seed: u64,
) -> Result<BinomialEstimate> {
    check_count(n)?;
    let root_alpha = (params.alpha_x() + params.alpha_p()).sqrt();
    let tally = chunked(n, seed, |rng| {
        let theta = psi + rng.sample::<f64, _>(StandardNormal) / root_alpha;
        (theta <= theta_star, 0.0)
    });
    Ok(BinomialEstimate::new(tally.hits, n, seed, std_normal_cdf(root_alpha * (theta_star - psi))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game(c: f64, ax: f64, ap: f64, sm: f64, m: f64) -> GameParams {
        GameParams::new(c, ax, ap, sm, m).unwrap()
    }

    #[test]
    fn everyone_attacks_below_a_huge_threshold() {
        let r = simulate_attack(0.4, 1e9, &game(0.5, 1.0, 1.0, 1.0, 0.5), 10_000, 1).unwrap();
        assert_eq!(r.attack_fraction_hat, 1.0);
        assert_eq!(r.analytic_attack, 1.0);
        assert!(r.within_band());
    }

    #[test]
    fn symmetric_point() {
        let r = simulate_attack(0.5, 0.5, &game(0.5, 1.0, 1.0, 1.0, 0.5), 1_000_000, 9).unwrap();
        assert_eq!(r.analytic_attack, 0.5);
        assert!(r.within_band(), "{r:?}");
    }

    #[test]
    fn generic_point_and_psi_law() {
        let p = game(0.5, 2.0, 1.0, 0.5, 0.6);
        let r = simulate_attack(0.3, 0.4, &p, 1_000_000, 42).unwrap();
        assert!(r.within_band(), "{r:?}");
        let nf = r.n_agents as f64;
        let se_mean = (r.psi_variance_analytic / nf).sqrt();
        let se_var = r.psi_variance_analytic * (2.0 / (nf - 1.0)).sqrt();
        assert!((r.psi_mean - r.psi_mean_analytic).abs() <= 4.0 * se_mean);
        assert!((r.psi_variance - r.psi_variance_analytic).abs() <= 4.0 * se_var);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let p = game(0.3, 1.0, 2.0, 0.3, 0.1);
        let a = simulate_attack(0.2, 0.3, &p, 200_000, 5).unwrap();
        let b = simulate_attack(0.2, 0.3, &p, 200_000, 5).unwrap();
        assert_eq!(a, b);
        let c = simulate_attack(0.2, 0.3, &p, 200_000, 6).unwrap();
        assert_ne!(a.attack_fraction_hat, c.attack_fraction_hat);
    }

    #[test]
    fn independent_of_thread_count() {
        let p = game(0.3, 1.0, 2.0, 0.3, 0.1);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_attack(0.2, 0.3, &p, 300_000, 77).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn point_mass_beliefs() {
        let p = game(0.5, 0.0, 1.0, 0.0, 0.5);
        let below = simulate_attack(0.1, 0.6, &p, 5_000, 1).unwrap();
        assert_eq!((below.attack_fraction_hat, below.analytic_attack), (1.0, 1.0));
        let above = simulate_attack(0.1, 0.4, &p, 5_000, 1).unwrap();
        assert_eq!((above.attack_fraction_hat, above.analytic_attack), (0.0, 0.0));
    }

    #[test]
    fn too_few_agents() {
        assert!(simulate_attack(0.5, 0.5, &game(0.5, 1.0, 1.0, 1.0, 0.5), 999, 1).is_err());
        assert!(simulate_success_prob(0.5, 0.5, &game(0.5, 1.0, 1.0, 1.0, 0.5), 10, 1).is_err());
    }

    #[test]
    fn success_probability() {
        let p = game(0.5, 1.0, 3.0, 0.0, 0.0);
        let median = simulate_success_prob(0.2, 0.2, &p, 400_000, 3).unwrap();
        assert_eq!(median.analytic, 0.5);
        assert!(median.within_band());
        let two_sd = simulate_success_prob(0.2, 0.2 + 2.0 / 2.0, &p, 400_000, 3).unwrap();
        assert!((two_sd.analytic - 0.977_249_868_051_820_8).abs() < 1e-12);
        assert!(two_sd.within_band());
        let never = simulate_success_prob(0.2, -1e9, &p, 10_000, 3).unwrap();
        assert_eq!(never.estimate, 0.0);
        assert!(never.within_band());
    }
}
