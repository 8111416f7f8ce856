use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ggame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggame")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

/// Data rows of a CSV output as parsed cells.
fn rows(out: &Output) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn header(out: &Output) -> String {
    format!("{}\n", stdout(out).lines().next().unwrap())
}

#[test]
fn check_verdicts_and_exit_codes() {
    let out = ggame(&["check"]);
    assert_eq!(code(&out), 0);
    let r = rows(&out);
    assert_eq!(r[0][3], "unique");
    assert!((num(&r[0][4]) - 0.601_057_719_598_567_3).abs() < 1e-12);

    let out = ggame(&["check", "--set", "alpha_p=10"]);
    assert_eq!(code(&out), 2);
    let r = rows(&out);
    assert_eq!(r[0][3], "not unique for all");
    assert!((num(&r[0][4]) + 0.298_942_280_401_432_7).abs() < 1e-12);

    let out = ggame(&["check", "--set", "env.type=actions", "--set", "env.sigma_eps=1", "--set", "alpha_p=1e-8"]);
    assert_eq!(code(&out), 0);
    assert!(rows(&out).iter().all(|r| r[3] == "unique"));
}

#[test]
fn solve_rows() {
    let r = rows(&ggame(&["solve"]));
    assert_eq!(r.len(), 1);
    assert_eq!((num(&r[0][0]), num(&r[0][1])), (0.5, 0.5));

    let out = ggame(&["solve", "--set", "alpha_p=10"]);
    assert_eq!(code(&out), 0);
    let r = rows(&out);
    assert_eq!(r.len(), 3);
    assert!((num(&r[0][0]) / 2.866_558_336_779_55e-7 - 1.0).abs() < 1e-9);

    let base = rows(&ggame(&["solve", "--set", "alpha_p=3", "--set", "mu_mean=0.2"]));
    let exo = rows(&ggame(&[
        "solve",
        "--set",
        "alpha_p=3",
        "--set",
        "mu_mean=0.2",
        "--set",
        "env.type=exogenous",
        "--set",
        "env.alpha_z=1e-12",
        "--set",
        "env.z=4",
    ]));
    assert_eq!(base.len(), exo.len());
    for (a, b) in base.iter().zip(&exo) {
        assert!((num(&a[0]) - num(&b[0])).abs() < 1e-10);
        assert!((num(&a[1]) - num(&b[1])).abs() < 1e-10);
    }
}

#[test]
fn solve_requires_the_realized_signal() {
    let out = ggame(&["solve", "--set", "env.type=exogenous", "--set", "env.alpha_z=2"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("`z`"));
}

#[test]
fn config_errors_exit_one() {
    assert_eq!(code(&ggame(&["check", "--set", "cost=1.5"])), 1);
    assert_eq!(code(&ggame(&["check", "--set", "colour=blue"])), 1);
    assert_eq!(code(&ggame(&["check", "--config", "/nonexistent/game.json"])), 1);
    assert_eq!(code(&ggame(&["sweep", "--axis", "alpha_p=1:5:1"])), 1);
    assert_eq!(code(&ggame(&["sweep"])), 1);
    assert_eq!(code(&ggame(&["simulate", "--theta", "0.5"])), 1);
    assert_eq!(code(&ggame(&["market"])), 1);
}

#[test]
fn config_file_and_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("game.json");
    std::fs::write(
        &cfg,
        r#"{"cost": 0.5, "alpha_x": 1, "alpha_p": 1, "sigma_mu": 0, "mu_mean": 0.5,
            "env": {"type": "exogenous", "alpha_z": 20, "z": 0.5}}"#,
    )
    .unwrap();
    let out_path = dir.path().join("roots.json");
    let out = ggame(&["solve", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let roots = v.as_array().unwrap();
    assert_eq!(roots.len(), 3);
    assert_eq!(roots[1]["theta_star"], 0.5);
}

#[test]
fn golden_headers() {
    assert_eq!(header(&ggame(&["check"])), golden("check.csv"));
    assert_eq!(header(&ggame(&["solve"])), golden("solve.csv"));
    assert_eq!(header(&ggame(&["sweep", "--axis", "alpha_p=1:5:3", "--no-scan"])), golden("sweep_1d.csv"));
    assert_eq!(
        header(&ggame(&["simulate", "--theta", "0.5", "--psi-star", "0.5", "--n", "1000"])),
        golden("simulate.csv")
    );
    let market = ggame(&["market", "--set", "env.type=market", "--set", "env.gamma=1", "--set", "env.sigma_eps=1"]);
    assert_eq!(header(&market), golden("market.csv"));
    assert_eq!(header(&ggame(&["verify", "--n", "1000"])), golden("verify.csv"));
}

fn sweep_rows(args: &[&str]) -> (i32, Vec<Vec<String>>) {
    let out = ggame(args);
    (code(&out), rows(&out))
}

#[test]
fn sweep_dispersion_boundary() {
    let (status, r) =
        sweep_rows(&["sweep", "--set", "alpha_x=0", "--set", "sigma_mu=0.1", "--axis", "sigma_mu=0:0.8:33"]);
    assert_eq!(status, 0);
    assert_eq!(r.len(), 33);
    // σ_μ = 0 with α_x = 0 has no random belief; the cell carries a note instead of counts.
    assert!(!r[0][10].is_empty());
    let flip = r.iter().position(|row| row[1] == "true").unwrap();
    let at = num(&r[flip][0]);
    assert!((at - 0.398_942_280_4).abs() <= 0.025, "{at}");
    assert_eq!(r[flip - 1][5], "3");
    assert_eq!(r[flip][5], "1");
}

#[test]
fn sweep_precision_boundary() {
    let (status, r) = sweep_rows(&["sweep", "--axis", "alpha_p=1:5:33", "--no-scan", "--set", "alpha_p=2"]);
    assert_eq!(status, 0);
    let flip = r.iter().position(|row| row[1] == "false").unwrap();
    let boundary = (2.0 * std::f64::consts::PI).sqrt();
    assert!(num(&r[flip - 1][0]) <= boundary && num(&r[flip][0]) >= boundary);
    assert_eq!(r[flip][4], "3");
}

#[test]
fn sweep_market_private_information_limit() {
    let (status, r) = sweep_rows(&[
        "sweep",
        "--set",
        "sigma_mu=1",
        "--set",
        "env.type=market",
        "--set",
        "env.gamma=1",
        "--set",
        "env.sigma_eps=1",
        "--axis",
        "alpha_x=0.01:10000:13:log",
    ]);
    assert_eq!(status, 0);
    assert_eq!((r[0][1].as_str(), r[0][5].as_str()), ("true", "1"));
    let last = r.last().unwrap();
    assert_eq!((last[1].as_str(), last[5].as_str()), ("false", "3"));
    assert!(!last[8].is_empty(), "witness signal recorded");
}

#[test]
fn sweep_is_reproducible_across_thread_counts() {
    let args = ["sweep", "--set", "alpha_x=0.5", "--axis", "alpha_p=1:6:9", "--axis", "sigma_mu=0.05:0.5:4"];
    let one = Command::new(env!("CARGO_BIN_EXE_ggame")).args(args).env("GGAME_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_ggame")).args(args).env("GGAME_THREADS", "4").output().unwrap();
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(rows(&one).len(), 36);
}

#[test]
fn sweep_from_config_section() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(
        &cfg,
        r#"{"cost": 0.5, "alpha_x": 1, "alpha_p": 1, "sigma_mu": 0, "mu_mean": 0.5,
            "sweep": {"axes": [{"key": "alpha_p", "lo": 1, "hi": 5, "steps": 5}], "scan_c_mu": false}}"#,
    )
    .unwrap();
    let (status, r) = sweep_rows(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(status, 0);
    assert_eq!(r.len(), 5);
}

#[test]
fn simulate_examples() {
    let out = ggame(&["simulate", "--theta", "0.5", "--psi-star", "0.5", "--set", "sigma_mu=1"]);
    assert_eq!(code(&out), 0);
    let r = rows(&out);
    assert!((num(&r[0][0]) - 0.5).abs() < 0.005);
    assert_eq!(r[0][6], "true");

    let out = ggame(&["simulate", "--theta", "0.5", "--psi-star", "1e9", "--n", "10000"]);
    assert_eq!(code(&out), 0);
    assert_eq!(num(&rows(&out)[0][0]), 1.0);

    let out = ggame(&[
        "simulate",
        "--set",
        "simulate.theta=0.3",
        "--set",
        "simulate.psi_star=0.4",
        "--set",
        "alpha_x=2",
        "--set",
        "sigma_mu=0.5",
        "--set",
        "mu_mean=0.6",
        "--seed",
        "42",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(rows(&out)[0][4], "1000000");
}

#[test]
fn market_examples() {
    let out = ggame(&[
        "market",
        "--set",
        "alpha_x=2",
        "--set",
        "mu_mean=0",
        "--set",
        "env.type=market",
        "--set",
        "env.gamma=1",
        "--set",
        "env.sigma_eps=1",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let m = &v[0];
    assert!((m["eta1"].as_f64().unwrap() - 6.0 / 7.0).abs() < 1e-15);
    assert!((m["eta2"].as_f64().unwrap() + 3.0 / 7.0).abs() < 1e-15);
    assert_eq!(m["alpha_z"], 4.0);
    assert_eq!(m["intercept"], 0.0);
    assert!(m["ratio_check"].as_f64().unwrap().abs() < 1e-12);

    let doubled = ggame(&[
        "market",
        "--set",
        "alpha_x=2",
        "--set",
        "env.type=market",
        "--set",
        "env.gamma=1",
        "--set",
        "env.sigma_eps=2",
    ]);
    assert_eq!(num(&rows(&doubled)[0][3]), 1.0);
}

#[test]
fn verify_passes_for_each_environment() {
    for extra in [
        vec!["--set", "sigma_mu=0.3"],
        vec!["--set", "env.type=exogenous", "--set", "env.alpha_z=2", "--set", "env.z=0.1"],
        vec!["--set", "env.type=market", "--set", "env.gamma=1", "--set", "env.sigma_eps=1"],
        vec!["--set", "sigma_mu=0.5", "--set", "env.type=actions", "--set", "env.sigma_eps=1", "--set", "env.s=0.2"],
    ] {
        let mut args = vec!["verify", "--n", "20000"];
        args.extend(extra);
        let out = ggame(&args);
        assert_eq!(code(&out), 0, "{}", stdout(&out));
        assert!(rows(&out).iter().all(|r| r[2] == "true"));
    }
}
