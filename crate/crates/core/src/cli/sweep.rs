//! Regime maps: closed-form verdicts against numerically counted equilibria on a
//! grid of up to three parameters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::{parse_game, resolve_key, set_path};
use super::table::{Cell, Table};
use crate::equilibria::{solve, uniqueness};
use crate::error::{Error, Result};
use crate::model::{Environment, GameParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    /// Document key, dotted for nested fields; bare environment names are accepted.
    pub key: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Axis {
    /// Parses `key=lo:hi:steps` with an optional `:log` suffix.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Config(format!("axis must look like key=lo:hi:steps[:log], got `{text}`"));
        let (key, range) = text.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        let scale = match parts.get(3).copied() {
            None | Some("linear") => Scale::Linear,
            Some("log") => Scale::Log,
            Some(_) => return Err(bad()),
        };
        Ok(Self {
            key: key.trim().to_string(),
            lo: num(parts[0])?,
            hi: num(parts[1])?,
            steps: parts[2].trim().parse().map_err(|_| bad())?,
            scale,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        let (a, b) = match self.scale {
            Scale::Linear => (self.lo, self.hi),
            Scale::Log => (self.lo.ln(), self.hi.ln()),
        };
        (0..self.steps)
            .map(|i| {
                if i == 0 {
                    return self.lo;
                }
                if i + 1 == self.steps {
                    return self.hi;
                }
                let t = a + (b - a) * i as f64 / last;
                match self.scale {
                    Scale::Linear => t,
                    Scale::Log => t.exp(),
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Config(format!("axis `{}` needs at least 2 steps", self.key)));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::Config(format!("axis `{}` needs finite lo < hi", self.key)));
        }
        if self.scale == Scale::Log && self.lo <= 0.0 {
            return Err(Error::Config(format!("log axis `{}` needs lo > 0", self.key)));
        }
        Ok(())
    }
}

/// Evenly spaced points on [lo, hi].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Span {
    pub const fn new(lo: f64, hi: f64, steps: usize) -> Self {
        Self { lo, hi, steps }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![0.5 * (self.lo + self.hi)],
            n => (0..n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// Points searched for multiplicity witnesses: attack cost, prior mean, and the
/// realized signal (z for public signals, S for the attack-revealing signal).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessGrid {
    pub cost: Span,
    pub mu_mean: Span,
    pub z: Span,
    pub s: Span,
}

impl Default for WitnessGrid {
    fn default() -> Self {
        Self {
            cost: Span::new(0.05, 0.95, 21),
            mu_mean: Span::new(-2.0, 3.0, 21),
            z: Span::new(-2.0, 3.0, 11),
            s: Span::new(-5.0, 5.0, 11),
        }
    }
}

impl WitnessGrid {
    fn signals(&self, env: &Environment) -> Vec<Option<f64>> {
        let span = match env {
            Environment::Baseline => return vec![None],
            Environment::ExogenousSignal { .. } | Environment::EndogenousMarket { .. } => self.z,
            Environment::ActionSignal { .. } => self.s,
        };
        span.values().into_iter().map(Some).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    #[serde(default = "yes")]
    pub scan_c_mu: bool,
    #[serde(default)]
    pub witness: WitnessGrid,
}

fn yes() -> bool {
    true
}

impl SweepSpec {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self { axes, scan_c_mu: true, witness: WitnessGrid::default() }
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        serde_json::from_value(value.clone()).map_err(|e| Error::Config(format!("sweep: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.axes.len()) {
            return Err(Error::Config(format!("a sweep takes 1 to 3 axes, got {}", self.axes.len())));
        }
        self.axes.iter().try_for_each(Axis::validate)
    }

    /// Grid points in row-major order (first axis slowest).
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.axes.iter().fold(vec![Vec::new()], |acc, axis| {
            let values = axis.values();
            acc.into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect()
        })
    }
}

/// Parameters achieving the largest root count in a witness search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub cost: f64,
    pub mu_mean: f64,
    pub signal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeCell {
    pub point: Vec<(String, f64)>,
    pub analytic_unique: bool,
    pub analytic_lhs: f64,
    pub analytic_margin: f64,
    /// Equilibria at the cell's own (c, E[μ], signal).
    pub roots_at_point: usize,
    pub numeric_max_roots: usize,
    pub witness: Option<Witness>,
    pub note: Option<String>,
}

impl RegimeCell {
    /// A closed-form "unique" verdict must never meet several numerical equilibria.
    pub fn consistent(&self) -> bool {
        !self.analytic_unique || self.numeric_max_roots <= 1
    }
}

/// Largest equilibrium count over the witness grid and the first point attaining it
/// when it exceeds one.
pub fn witness_search(params: &GameParams, env: &Environment, grid: &WitnessGrid) -> Result<(usize, Option<Witness>)> {
    let mut best = (0, None);
    for cost in grid.cost.values() {
        let p = params.with_cost(cost)?;
        for mu_mean in grid.mu_mean.values() {
            let p = p.with_mu_mean(mu_mean)?;
            for signal in grid.signals(env) {
                let e = signal.map_or(*env, |v| env.with_signal(v));
                let n = solve(&p, &e)?.len();
                if n > best.0 {
                    best = (n, (n > 1).then_some(Witness { cost, mu_mean, signal }));
                }
            }
        }
    }
    Ok(best)
}

fn evaluate(template: &Value, spec: &SweepSpec, point: &[f64]) -> Result<RegimeCell> {
    let mut doc = template.clone();
    for (axis, &v) in spec.axes.iter().zip(point) {
        set_path(&mut doc, &resolve_key(&axis.key), Value::from(v))?;
    }
    let invalid = |e: Error| Error::Config(format!("sweep point {point:?}: {e}"));
    let game = parse_game(&doc)?;
    let params = game.params().map_err(invalid)?;
    let env = game.environment(false).map_err(invalid)?;

    let mut cell = RegimeCell {
        point: spec.axes.iter().map(|a| a.key.clone()).zip(point.iter().copied()).collect(),
        analytic_unique: false,
        analytic_lhs: f64::NAN,
        analytic_margin: f64::NAN,
        roots_at_point: 0,
        numeric_max_roots: 0,
        witness: None,
        note: None,
    };
    let numeric = || -> Result<_> {
        let report = uniqueness(&params, &env)?;
        let here = solve(&params, &env)?.len();
        let (max, witness) = if spec.scan_c_mu { witness_search(&params, &env, &spec.witness)? } else { (here, None) };
        Ok((report, here, max.max(here), witness))
    };
    match numeric() {
        Ok((report, here, max, witness)) => {
            cell.analytic_unique = report.unique_for_all;
            cell.analytic_lhs = report.lhs;
            cell.analytic_margin = report.margin;
            cell.roots_at_point = here;
            cell.numeric_max_roots = max;
            cell.witness = witness;
        }
        // Corners such as α_x = σ_μ = 0 have no interior threshold equilibrium.
        Err(Error::Domain(msg)) => cell.note = Some(msg),
        Err(e) => return Err(e),
    }
    Ok(cell)
}

/// Evaluates every grid point in parallel; output order follows the grid.
pub fn run_sweep(template: &Value, spec: &SweepSpec) -> Result<Vec<RegimeCell>> {
    spec.validate()?;
    let points = spec.points();
    log::info!("sweeping {} cells", points.len());
    points.par_iter().map(|p| evaluate(template, spec, p)).collect()
}

pub const REGIME_COLUMNS: [&str; 10] = [
    "analytic_unique",
    "analytic_lhs",
    "analytic_margin",
    "roots_at_point",
    "numeric_max_roots",
    "witness_cost",
    "witness_mu_mean",
    "witness_signal",
    "consistent",
    "note",
];

pub fn regime_table(spec: &SweepSpec, cells: &[RegimeCell]) -> Table {
    let mut table = Table::new(spec.axes.iter().map(|a| a.key.as_str()).chain(REGIME_COLUMNS));
    for cell in cells {
        let mut row: Vec<Cell> = cell.point.iter().map(|(_, v)| Cell::Num(*v)).collect();
        row.extend([
            cell.analytic_unique.into(),
            cell.analytic_lhs.into(),
            cell.analytic_margin.into(),
            cell.roots_at_point.into(),
            cell.numeric_max_roots.into(),
            cell.witness.map(|w| w.cost).into(),
            cell.witness.map(|w| w.mu_mean).into(),
            cell.witness.and_then(|w| w.signal).into(),
            cell.consistent().into(),
            cell.note.clone().into(),
        ]);
        table.push(row);
    }
    table
}
