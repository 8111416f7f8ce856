//! C ABI over the `ggame` solver.
//!
//! Every fallible function returns a [`GgStatus`]. On failure the message is kept in
//! thread-local storage and can be copied out with [`gg_last_error_message`]. Handles
//! returned through out-pointers are owned by the caller and released with the
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use ggame::actions::{strategy_uniqueness, ActionSignalConfig};
use ggame::equilibria::{solve, uniqueness};
use ggame::market::solve_market;
use ggame::model::{Environment, GameConfig, GameParams};
use ggame::oracle::simulate_attack;
use ggame::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GgStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Solver = 3,
    Singularity = 4,
    Config = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Game parameters (c, α_x, α_p, σ_μ, E[μ]).
pub struct GgParams(GameParams);

/// Information environment with its realized public signal.
pub struct GgEnvironment(Environment);

/// One threshold equilibrium.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GgEquilibrium {
    pub theta_star: f64,
    pub psi_star: f64,
    /// Φ⁻¹(θ*).
    pub probit: f64,
    pub slope_at_root: f64,
    pub degenerate: bool,
}

/// Closed-form uniqueness condition `lhs ≥ threshold`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GgUniqueness {
    pub lhs: f64,
    pub threshold: f64,
    pub margin: f64,
    pub unique_for_all: bool,
}

/// Linear price P = η₁θ + η₂ε + intercept and the precision it reveals.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GgMarket {
    pub eta1: f64,
    pub eta2: f64,
    pub intercept: f64,
    pub alpha_z: f64,
}

/// Strategy-level uniqueness flags for the attack-revealing signal.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GgStrategyReport {
    pub dzds_max: f64,
    pub e11_lhs: f64,
    pub e12_lhs: f64,
    pub condition_e11: bool,
    pub condition_e12: bool,
    pub strategies_unique: bool,
}

/// Monte Carlo attack fraction against the closed form.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GgSimulation {
    pub attack_fraction_hat: f64,
    pub analytic_attack: f64,
    pub std_error: f64,
    pub psi_mean: f64,
    pub psi_variance: f64,
    pub n_agents: u64,
    pub seed: u64,
    pub within_band: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: GgStatus, msg: impl Into<String>) -> GgStatus {
    set_error(msg.into());
    status
}

fn from_error(err: Error) -> GgStatus {
    let status = match err {
        Error::Domain(_) => GgStatus::Domain,
        Error::Solver(_) => GgStatus::Solver,
        Error::Singularity(_) => GgStatus::Singularity,
        Error::Config(_) => GgStatus::Config,
    };
    fail(status, err.to_string())
}

fn guard<F: FnOnce() -> Result<(), GgStatus> + UnwindSafe>(f: F) -> GgStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => {
            set_error(String::new());
            GgStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(GgStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, GgStatus>;
}

impl<T> OrStatus<T> for ggame::Result<T> {
    fn or_status(self) -> Result<T, GgStatus> {
        self.map_err(from_error)
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, GgStatus> {
    p.as_ref().ok_or_else(|| fail(GgStatus::NullPointer, format!("{name} is null")))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), GgStatus> {
    if out.is_null() {
        return Err(fail(GgStatus::NullPointer, format!("{name} is null")));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated, truncated
/// to `len`) and returns the full message length excluding the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn gg_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gg_params_new(
    cost: f64,
    alpha_x: f64,
    alpha_p: f64,
    sigma_mu: f64,
    mu_mean: f64,
    out: *mut *mut GgParams,
) -> GgStatus {
    guard(|| {
        let p = GameParams::new(cost, alpha_x, alpha_p, sigma_mu, mu_mean).or_status()?;
        write(out, Box::into_raw(Box::new(GgParams(p))), "out")
    })
}

/// # Safety
/// `params` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gg_params_free(params: *mut GgParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

fn env_out(env: ggame::Result<Environment>, out: *mut *mut GgEnvironment) -> GgStatus {
    guard(|| {
        let env = env.or_status()?;
        unsafe { write(out, Box::into_raw(Box::new(GgEnvironment(env))), "out") }
    })
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gg_env_baseline(out: *mut *mut GgEnvironment) -> GgStatus {
    env_out(Ok(Environment::Baseline), out)
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gg_env_exogenous(alpha_z: f64, z: f64, out: *mut *mut GgEnvironment) -> GgStatus {
    env_out(Environment::exogenous(alpha_z, z), out)
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gg_env_market(gamma: f64, sigma_eps: f64, z: f64, out: *mut *mut GgEnvironment) -> GgStatus {
    env_out(Environment::market(gamma, sigma_eps, z), out)
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gg_env_actions(sigma_eps: f64, s: f64, out: *mut *mut GgEnvironment) -> GgStatus {
    env_out(Environment::actions(sigma_eps, s), out)
}

/// # Safety
/// `env` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gg_env_free(env: *mut GgEnvironment) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// Parses a JSON game document into a parameter and an environment handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; both out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gg_game_from_json(
    json: *const c_char,
    params_out: *mut *mut GgParams,
    env_out: *mut *mut GgEnvironment,
) -> GgStatus {
    guard(|| {
        if json.is_null() {
            return Err(fail(GgStatus::NullPointer, "json is null"));
        }
        if params_out.is_null() || env_out.is_null() {
            return Err(fail(GgStatus::NullPointer, "out is null"));
        }
        let text =
            CStr::from_ptr(json).to_str().map_err(|e| fail(GgStatus::Config, format!("json is not UTF-8: {e}")))?;
        let cfg: GameConfig =
            serde_json::from_str(text).map_err(|e| fail(GgStatus::Config, format!("invalid game JSON: {e}")))?;
        let params = cfg.params().or_status()?;
        let env = cfg.environment(false).or_status()?;
        write(params_out, Box::into_raw(Box::new(GgParams(params))), "params_out")?;
        write(env_out, Box::into_raw(Box::new(GgEnvironment(env))), "env_out")
    })
}

/// Solves for all threshold equilibria, sorted by θ*.
///
/// `*count` receives the number of equilibria. If it exceeds `capacity`, only the
/// first `capacity` are written and `GG_STATUS_BUFFER_TOO_SMALL` is returned.
/// Three slots always suffice.
///
/// # Safety
/// Handles must be live; `out` must be valid for `capacity` writes (or null when
/// `capacity` is 0); `count` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gg_solve(
    params: *const GgParams,
    env: *const GgEnvironment,
    out: *mut GgEquilibrium,
    capacity: usize,
    count: *mut usize,
) -> GgStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let e = &deref(env, "env")?.0;
        let set = solve(p, e).or_status()?;
        write(count, set.len(), "count")?;
        if capacity > 0 && out.is_null() {
            return Err(fail(GgStatus::NullPointer, "out is null"));
        }
        for (i, eq) in set.iter().take(capacity).enumerate() {
            out.add(i).write(GgEquilibrium {
                theta_star: eq.theta_star,
                psi_star: eq.psi_star,
                probit: eq.probit,
                slope_at_root: eq.slope_at_root,
                degenerate: eq.degenerate,
            });
        }
        if set.len() > capacity {
            return Err(fail(GgStatus::BufferTooSmall, format!("{} equilibria, capacity {capacity}", set.len())));
        }
        Ok(())
    })
}

/// Closed-form threshold uniqueness condition for the environment.
///
/// # Safety
/// Handles must be live; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gg_uniqueness(
    params: *const GgParams,
    env: *const GgEnvironment,
    out: *mut GgUniqueness,
) -> GgStatus {
    guard(|| {
        let r = uniqueness(&deref(params, "params")?.0, &deref(env, "env")?.0).or_status()?;
        write(
            out,
            GgUniqueness { lhs: r.lhs, threshold: r.threshold, margin: r.margin, unique_for_all: r.unique_for_all },
            "out",
        )
    })
}

/// Strategy-level uniqueness for the attack-revealing signal; the environment must
/// be an actions environment.
///
/// # Safety
/// Handles must be live; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gg_strategy_uniqueness(
    params: *const GgParams,
    env: *const GgEnvironment,
    out: *mut GgStrategyReport,
) -> GgStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let Environment::ActionSignal { sigma_eps, s_value } = deref(env, "env")?.0 else {
            return Err(fail(GgStatus::Config, "strategy uniqueness needs an actions environment"));
        };
        let cfg = ActionSignalConfig::new(p, sigma_eps, s_value).or_status()?;
        let r = strategy_uniqueness(p, &cfg);
        write(
            out,
            GgStrategyReport {
                dzds_max: r.dzds_max,
                e11_lhs: r.e11_lhs,
                e12_lhs: r.e12_lhs,
                condition_e11: r.condition_e11,
                condition_e12: r.condition_e12,
                strategies_unique: r.strategies_unique,
            },
            "out",
        )
    })
}

/// Price coefficients of the CARA-normal market.
///
/// # Safety
/// `params` must be live; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gg_solve_market(
    params: *const GgParams,
    gamma: f64,
    sigma_eps: f64,
    out: *mut GgMarket,
) -> GgStatus {
    guard(|| {
        let m = solve_market(&deref(params, "params")?.0, gamma, sigma_eps).or_status()?;
        write(out, GgMarket { eta1: m.eta1, eta2: m.eta2, intercept: m.intercept, alpha_z: m.alpha_z }, "out")
    })
}

/// Simulates `n` agents at fundamental θ using cutoff ψ*.
///
/// # Safety
/// `params` must be live; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gg_simulate_attack(
    params: *const GgParams,
    theta: f64,
    psi_star: f64,
    n: u64,
    seed: u64,
    out: *mut GgSimulation,
) -> GgStatus {
    guard(|| {
        let r = simulate_attack(theta, psi_star, &deref(params, "params")?.0, n, seed).or_status()?;
        write(
            out,
            GgSimulation {
                attack_fraction_hat: r.attack_fraction_hat,
                analytic_attack: r.analytic_attack,
                std_error: r.std_error,
                psi_mean: r.psi_mean,
                psi_variance: r.psi_variance,
                n_agents: r.n_agents,
                seed: r.seed,
                within_band: r.within_band(),
            },
            "out",
        )
    })
}
