use proptest::prelude::*;

use ggame::actions::{solve_action, strategy_uniqueness, threshold_uniqueness_action, ActionSignalConfig};
use ggame::equilibria::{solve, uniqueness};
use ggame::market::{clearing_residual, solve_market};
use ggame::model::{Environment, GameParams};
use ggame::oracle::simulate_attack;

fn params() -> impl Strategy<Value = GameParams> {
    (0.05..0.95f64, -2.0..3.0f64, 0.05..5.0f64, 0.05..15.0f64, 0.0..1.5f64)
        .prop_map(|(c, m, ax, ap, sm)| GameParams::new(c, ax, ap, sm, m).unwrap())
}

fn environment() -> impl Strategy<Value = Environment> {
    prop_oneof![
        Just(Environment::Baseline),
        (0.01..30.0f64, -2.0..3.0f64).prop_map(|(az, z)| Environment::exogenous(az, z).unwrap()),
        (0.1..3.0f64, 0.1..3.0f64, -2.0..3.0f64).prop_map(|(g, s, z)| Environment::market(g, s, z).unwrap()),
        (0.05..5.0f64, -5.0..5.0f64).prop_map(|(s, v)| Environment::actions(s, v).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn closed_form_uniqueness_implies_one_root(p in params(), env in environment()) {
        let set = solve(&p, &env).unwrap();
        prop_assert!(set.degenerate() || set.len() % 2 == 1);
        if uniqueness(&p, &env).unwrap().unique_for_all {
            prop_assert_eq!(set.len(), 1);
        }
    }

    #[test]
    fn recovered_beliefs_sorted_with_thresholds(p in params(), sigma_eps in 0.05..5.0f64, s in -5.0..5.0f64) {
        let cfg = ActionSignalConfig::new(&p, sigma_eps, s).unwrap();
        let set = solve_action(&p, &cfg).unwrap();
        let eqs: Vec<_> = set.iter().collect();
        for w in eqs.windows(2) {
            prop_assert!(w[0].theta_star <= w[1].theta_star);
            prop_assert!(w[0].psi_star < w[1].psi_star);
        }
    }

    #[test]
    fn strategy_flags_are_nested(p in params(), sigma_eps in 1e-3..1e3f64) {
        let cfg = ActionSignalConfig::new(&p, sigma_eps, 0.0).unwrap();
        let r = strategy_uniqueness(&p, &cfg);
        prop_assert!(!r.condition_e11 || r.condition_e12);
        prop_assert_eq!(r.strategies_unique, r.condition_e11 && r.condition_e12);
        // e12 is the threshold condition in disguise.
        prop_assert_eq!(r.condition_e12, threshold_uniqueness_action(&p, &cfg).unique_for_all);
    }

    #[test]
    fn attack_signal_precision_falls_with_dispersion(p in params(), sigma_eps in 0.05..5.0f64, extra in 0.01..2.0f64) {
        let wider = p.with_sigma_mu(p.sigma_mu() + extra).unwrap();
        let a = ActionSignalConfig::new(&p, sigma_eps, 0.0).unwrap().alpha_z;
        let b = ActionSignalConfig::new(&wider, sigma_eps, 0.0).unwrap().alpha_z;
        prop_assert!(b < a);
    }

    #[test]
    fn market_clears_and_scales(p in params(), gamma in 0.1..5.0f64, sigma_eps in 0.1..5.0f64, theta in -3.0..3.0f64, eps in -3.0..3.0f64) {
        let me = solve_market(&p, gamma, sigma_eps).unwrap();
        prop_assert!(me.eta1 > 0.0 && me.eta2 < 0.0);
        prop_assert!((me.alpha_z - (me.eta1 / me.eta2).powi(2)).abs() <= 1e-12 * me.alpha_z.max(1.0));
        prop_assert!(clearing_residual(theta, eps, &me, &p, gamma, sigma_eps).abs() <= 1e-10 * (1.0 + me.alpha_z));
        let doubled = solve_market(&p, gamma, 2.0 * sigma_eps).unwrap();
        prop_assert!((4.0 * doubled.alpha_z - me.alpha_z).abs() <= 1e-13 * me.alpha_z);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn simulation_is_reproducible(p in params(), theta in 0.0..1.0f64, psi in -1.0..2.0f64, seed in any::<u64>()) {
        let a = simulate_attack(theta, psi, &p, 5_000, seed).unwrap();
        let b = simulate_attack(theta, psi, &p, 5_000, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
