//! The `ggame` command line.

pub mod config;
pub mod sweep;
pub mod table;
pub mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::actions::{strategy_uniqueness, ActionSignalConfig};
use crate::equilibria::{solve, uniqueness};
use crate::error::Error;
use crate::market::solve_market;
use crate::model::{Environment, UniquenessReport};
use crate::oracle::simulate_attack;
use config::{load_document, Document};
use sweep::{regime_table, run_sweep, Axis, SweepSpec};
use table::{Cell, Format, Table};
use verify::{run_verify, verify_table, CheckKind, VerifyOptions};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Status {
    Ok = 0,
    Config = 1,
    NotUnique = 2,
    Solver = 3,
    Inconsistent = 4,
    BandFailure = 5,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s as u8)
    }
}

impl From<&Error> for Status {
    fn from(e: &Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain(_) => Status::Config,
            Error::Solver(_) | Error::Singularity(_) => Status::Solver,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ggame", version, about = "Threshold equilibria of coordination games with heterogeneous priors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON game description.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override a (dotted) key, e.g. `--set env.sigma_eps=0.1`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output format; inferred from the `--out` extension, else CSV.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form uniqueness conditions for the configured environment.
    Check(Common),
    /// All threshold equilibria at the realized signal.
    Solve(Common),
    /// Regime map over one to three parameters.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `key=lo:hi:steps[:log]`; replaces the axes of the config's sweep section.
        #[arg(long, value_name = "SPEC")]
        axis: Vec<String>,
        /// Skip the multiplicity witness search over (c, E[μ], signal).
        #[arg(long)]
        no_scan: bool,
    },
    /// Monte Carlo check of the critical mass condition.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        psi_star: Option<f64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Linear rational-expectations price of the asset market.
    Market(Common),
    /// Oracle cross-checks of the configured game.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200_000)]
        n: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Check(c) | Command::Solve(c) | Command::Market(c) => c,
            Command::Sweep { common, .. } | Command::Simulate { common, .. } | Command::Verify { common, .. } => common,
        }
    }
}

/// Parses arguments, configures logging and the worker pool, and runs.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    if let Some(threads) = std::env::var("GGAME_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("GGAME_THREADS ignored: {e}");
        }
    }
    run(Cli::parse()).into()
}

pub fn run(cli: Cli) -> Status {
    match execute(&cli.command) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            Status::from(&e)
        }
    }
}

fn emit(table: &Table, common: &Common) -> crate::Result<()> {
    table.emit(Format::resolve(common.format, common.out.as_deref()), common.out.as_deref())
}

fn execute(command: &Command) -> crate::Result<Status> {
    let common = command.common();
    let doc = load_document(common.config.as_deref(), &common.set)?;
    match command {
        Command::Check(_) => cmd_check(&doc, common),
        Command::Solve(_) => cmd_solve(&doc, common),
        Command::Sweep { axis, no_scan, .. } => cmd_sweep(&doc, common, axis, *no_scan),
        Command::Simulate { theta, psi_star, n, seed, .. } => cmd_simulate(&doc, common, *theta, *psi_star, *n, *seed),
        Command::Market(_) => cmd_market(&doc, common),
        Command::Verify { n, seed, .. } => cmd_verify(&doc, common, VerifyOptions { n_agents: *n, seed: *seed }),
    }
}

fn verdict(unique: bool) -> &'static str {
    if unique {
        "unique"
    } else {
        "not unique for all"
    }
}

fn condition_row(name: &str, r: &UniquenessReport) -> Vec<Cell> {
    vec![name.into(), r.lhs.into(), r.threshold.into(), verdict(r.unique_for_all).into(), r.margin.into()]
}

fn cmd_check(doc: &Document, common: &Common) -> crate::Result<Status> {
    let params = doc.game.params()?;
    let env = doc.game.environment(false)?;
    let report = uniqueness(&params, &env)?;
    let mut table = Table::new(["condition", "lhs", "threshold", "verdict", "margin"]);
    let name = match env {
        Environment::Baseline => "thresholds",
        Environment::ExogenousSignal { .. } => "thresholds_public_signal",
        Environment::EndogenousMarket { .. } => "thresholds_market_price",
        Environment::ActionSignal { .. } => "thresholds_given_signal",
    };
    table.push(condition_row(name, &report));
    let mut unique = report.unique_for_all;
    if let Environment::ActionSignal { sigma_eps, s_value } = env {
        let cfg = ActionSignalConfig::new(&params, sigma_eps, s_value)?;
        let s = strategy_uniqueness(&params, &cfg);
        for (label, lhs, holds) in
            [("strategies_e11", s.e11_lhs, s.condition_e11), ("strategies_e12", s.e12_lhs, s.condition_e12)]
        {
            let r = UniquenessReport::from_lhs(lhs);
            debug_assert_eq!(r.unique_for_all, holds);
            table.push(condition_row(label, &r));
        }
        table.push(vec![
            "strategies_dzds_max".into(),
            s.dzds_max.into(),
            0.0.into(),
            verdict(s.dzds_max < 0.0).into(),
            (-s.dzds_max).into(),
        ]);
        unique &= s.strategies_unique;
    }
    emit(&table, common)?;
    Ok(if unique { Status::Ok } else { Status::NotUnique })
}

fn cmd_solve(doc: &Document, common: &Common) -> crate::Result<Status> {
    let params = doc.game.params()?;
    let env = doc.game.environment(true)?;
    let set = solve(&params, &env)?;
    let mut table = Table::new(["theta_star", "psi_star", "probit", "slope_at_root", "degenerate"]);
    for e in set.iter() {
        table.push(vec![
            e.theta_star.into(),
            e.psi_star.into(),
            e.probit.into(),
            e.slope_at_root.into(),
            e.degenerate.into(),
        ]);
    }
    emit(&table, common)?;
    Ok(Status::Ok)
}

fn cmd_sweep(doc: &Document, common: &Common, axes: &[String], no_scan: bool) -> crate::Result<Status> {
    let mut spec = match &doc.sweep {
        Some(v) => SweepSpec::from_json(v)?,
        None => SweepSpec::new(Vec::new()),
    };
    if !axes.is_empty() {
        spec.axes = axes.iter().map(|a| Axis::parse(a)).collect::<crate::Result<_>>()?;
    }
    if no_scan {
        spec.scan_c_mu = false;
    }
    let cells = run_sweep(&doc.game_json, &spec)?;
    emit(&regime_table(&spec, &cells), common)?;
    let bad: Vec<usize> = cells.iter().enumerate().filter(|(_, c)| !c.consistent()).map(|(i, _)| i).collect();
    if !bad.is_empty() {
        eprintln!("error: closed-form uniqueness contradicted by root counts at cells {bad:?}");
        return Ok(Status::Inconsistent);
    }
    Ok(Status::Ok)
}

fn cmd_simulate(
    doc: &Document,
    common: &Common,
    theta: Option<f64>,
    psi_star: Option<f64>,
    n: Option<u64>,
    seed: Option<u64>,
) -> crate::Result<Status> {
    let section = doc.simulate;
    let missing = |k: &str| Error::Config(format!("simulate needs `{k}` (flag or simulate.{k} in the config)"));
    let theta = theta.or(section.map(|s| s.theta)).ok_or_else(|| missing("theta"))?;
    let psi_star = psi_star.or(section.map(|s| s.psi_star)).ok_or_else(|| missing("psi_star"))?;
    let n = n.or(section.map(|s| s.n)).unwrap_or(1_000_000);
    let seed = seed.or(section.map(|s| s.seed)).unwrap_or(42);
    let params = doc.game.params()?;
    let r = simulate_attack(theta, psi_star, &params, n, seed)?;
    let mut table =
        Table::new(["attack_fraction_hat", "analytic_attack", "std_error", "deviation", "n_agents", "seed", "pass"]);
    table.push(vec![
        r.attack_fraction_hat.into(),
        r.analytic_attack.into(),
        r.std_error.into(),
        r.deviation().into(),
        r.n_agents.into(),
        r.seed.into(),
        r.within_band().into(),
    ]);
    emit(&table, common)?;
    Ok(if r.within_band() { Status::Ok } else { Status::BandFailure })
}

fn cmd_market(doc: &Document, common: &Common) -> crate::Result<Status> {
    let params = doc.game.params()?;
    let Environment::EndogenousMarket { gamma, sigma_eps, .. } = doc.game.environment(false)? else {
        return Err(Error::Config("market needs env.type = \"market\" with gamma and sigma_eps".into()));
    };
    let me = solve_market(&params, gamma, sigma_eps)?;
    let mut table = Table::new(["eta1", "eta2", "intercept", "alpha_z", "ratio_check"]);
    let ratio_check = me.eta1 / me.eta2 + params.alpha_x() / (gamma * sigma_eps);
    table.push(vec![me.eta1.into(), me.eta2.into(), me.intercept.into(), me.alpha_z.into(), ratio_check.into()]);
    emit(&table, common)?;
    Ok(Status::Ok)
}

fn cmd_verify(doc: &Document, common: &Common, opts: VerifyOptions) -> crate::Result<Status> {
    let params = doc.game.params()?;
    let env = doc.game.environment(false)?;
    let results = run_verify(&params, &env, &opts)?;
    emit(&verify_table(&results), common)?;
    let failed = |kind| results.iter().any(|r| r.kind == kind && !r.passed);
    Ok(if failed(CheckKind::Consistency) {
        Status::Inconsistent
    } else if failed(CheckKind::Band) {
        Status::BandFailure
    } else {
        Status::Ok
    })
}
