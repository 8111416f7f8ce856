//! Oracle cross-checks of one configured game.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::table::Table;
use crate::actions::{dzds_check, ActionSignalConfig};
use crate::equilibria::{fixed_point, solve, uniqueness, uniqueness_baseline};
use crate::error::Result;
use crate::market::{clearing_residual, solve_market};
use crate::model::{Environment, GameParams};
use crate::numerics::{enumerate_roots, gauss_hermite, Tolerances};
use crate::oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Deterministic agreement between two routes.
    Consistency,
    /// Monte Carlo agreement within a confidence band.
    Band,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, kind: CheckKind, passed: bool, detail: String) -> CheckResult {
    CheckResult { name, kind, passed, detail }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub n_agents: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { n_agents: 200_000, seed: 42 }
    }
}

pub fn run_verify(params: &GameParams, env: &Environment, opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    use CheckKind::*;
    let mut out = Vec::new();
    let tol = Tolerances::default();
    let set = solve(params, env)?;
    let fp = fixed_point(params, env)?;

    let worst_gap = set.iter().map(|e| fp.gap(e.probit).abs() / (1.0 + e.probit.abs())).fold(0.0, f64::max);
    out.push(check("roots_zero_residual", Consistency, worst_gap <= 1e-9, format!("max scaled gap {worst_gap:.3e}")));

    let span = (fp.intercept - 1e-9, fp.intercept + fp.slope + 1e-9);
    let scan = enumerate_roots(|y| fp.gap(y), span, 20_000, &tol);
    let agree = scan.degenerate() || set.degenerate() || scan.roots.len() == set.len();
    out.push(check(
        "grid_scan_root_count",
        Consistency,
        agree,
        format!("solver {} vs scan {}", set.len(), scan.roots.len()),
    ));

    let report = uniqueness(params, env)?;
    out.push(check(
        "closed_form_vs_count",
        Consistency,
        !report.unique_for_all || set.len() == 1,
        format!("unique_for_all={} roots={}", report.unique_for_all, set.len()),
    ));

    let rule = gauss_hermite(256)?;
    if params.alpha_x() > 0.0 {
        let worst = (1..10)
            .map(|k| {
                let theta = k as f64 / 10.0;
                let q = oracle::cmc_prior_integral(theta, params, &rule)?;
                Ok((q - oracle::cmc_closed_form(theta, params)?).abs())
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        out.push(check("cmc_prior_integral", Consistency, worst <= 1e-8, format!("max error {worst:.3e}")));

        let sup = oracle::uniqueness_lhs_supremum(params)?;
        let unique = uniqueness_baseline(params).unique_for_all;
        out.push(check(
            "prior_explicit_condition",
            Consistency,
            (sup <= 1.0) == unique,
            format!("supremum {sup:.6} unique={unique}"),
        ));
    }

    let mut worst_mgf: f64 = 0.0;
    for i in 0..=50 {
        for j in 0..=50 {
            let (t, e) = (0.2 * i as f64, -5.0 + 0.2 * j as f64);
            worst_mgf = worst_mgf.max((oracle::mgf_noncentral_chi2(t, e)? - oracle::mgf_quadrature(t, e, &rule)).abs());
        }
    }
    out.push(check("mgf_grid", Consistency, worst_mgf <= 1e-8, format!("max error {worst_mgf:.3e}")));

    match *env {
        Environment::EndogenousMarket { gamma, sigma_eps, .. } if params.alpha_x() > 0.0 => {
            let me = solve_market(params, gamma, sigma_eps)?;
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let worst = (0..1000)
                .map(|_| {
                    let (theta, eps) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
                    clearing_residual(theta, eps, &me, params, gamma, sigma_eps).abs()
                })
                .fold(0.0, f64::max);
            out.push(check("market_clearing", Consistency, worst <= 1e-10, format!("max residual {worst:.3e}")));
        }
        Environment::ActionSignal { sigma_eps, s_value } => {
            let cfg = ActionSignalConfig::new(params, sigma_eps, s_value)?;
            match dzds_check(params, &cfg, 1e-6) {
                Ok(Some(c)) => out.push(check(
                    "dzds_finite_difference",
                    Consistency,
                    c.relative_error() <= 1e-6,
                    format!("analytic {:.9e} vs {:.9e}", c.analytic, c.finite_difference),
                )),
                Ok(None) => log::info!("dZ/dS check skipped: threshold not locally unique at S={s_value}"),
                Err(e) => log::warn!("dZ/dS check skipped: {e}"),
            }
        }
        _ => {}
    }

    if params.belief_spread() > 0.0 {
        if let Some(eq) =
            set.iter().find(|e| matches!(env, Environment::Baseline) && e.theta_star > 0.0 && e.theta_star < 1.0)
        {
            let sim = oracle::simulate_attack(eq.theta_star, eq.psi_star, params, opts.n_agents, opts.seed)?;
            out.push(check(
                "simulated_attack",
                Band,
                sim.within_band(),
                format!("hat {:.6} vs {:.6} (se {:.2e})", sim.attack_fraction_hat, sim.analytic_attack, sim.std_error),
            ));
        }
        let alpha = params.alpha_x() + params.alpha_p();
        let psi = 0.3;
        let theta_star = psi + 1.0 / alpha.sqrt();
        let est = oracle::simulate_success_prob(psi, theta_star, params, opts.n_agents, opts.seed)?;
        out.push(check(
            "simulated_success_probability",
            Band,
            est.within_band(),
            format!("hat {:.6} vs {:.6} (se {:.2e})", est.estimate, est.analytic, est.std_error),
        ));
    }
    Ok(out)
}

pub fn verify_table(results: &[CheckResult]) -> Table {
    let mut t = Table::new(["check", "kind", "passed", "detail"]);
    for r in results {
        let kind = match r.kind {
            CheckKind::Consistency => "consistency",
            CheckKind::Band => "band",
        };
        t.push(vec![r.name.into(), kind.into(), r.passed.into(), r.detail.clone().into()]);
    }
    t
}
