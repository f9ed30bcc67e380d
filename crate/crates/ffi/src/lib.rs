//! C ABI over the `hybridsat` crate.
//!
//! Conventions:
//! - every fallible function returns an [`HsStatus`]; on failure the
//!   message is available from [`hs_last_error`] on the same thread;
//! - handles (`HsProgram`, `HsScenario`, `HsTrace`) are opaque and owned
//!   by the caller once returned, and must be released with their `_free`
//!   function;
//! - strings returned as `char *` are NUL-terminated UTF-8, owned by the
//!   caller and released with [`hs_string_free`];
//! - state vectors are `double[6]` laid out as `rx, ry, rz, vx, vy, vz`.
//!
//! Panics never cross the boundary; they surface as `HS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use hybridsat::continuous::{self, BoundsSpec, ContinuousError, MeanMotion, Proximity, StateVector};
use hybridsat::lang::{self, Plan};
use hybridsat::orchestrator::{self, RunError, ScenarioConfig, TraceLog};

/// Result code of every fallible call. Values 3 to 7 match the exit
/// codes of the `hybridsat` command line tool.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    /// Invalid scenario or program text.
    Config = 3,
    BudgetExhausted = 4,
    UnknownPlan = 5,
    UncontrollableAxis = 6,
    Io = 7,
    /// A required pointer argument was NULL.
    NullArgument = 10,
    InvalidUtf8 = 11,
    /// A numeric argument was out of range or non-finite.
    InvalidArgument = 12,
    /// Two-impulse targeting has no solution for this horizon.
    SingularHorizon = 13,
    Panic = 99,
}

/// Proximity verdict of [`hs_comp_distance`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsProximity {
    In = 0,
    Out = 1,
}

/// A parsed plan program.
pub struct HsProgram {
    plans: Vec<Plan>,
}

/// A loaded scenario, ready to run.
pub struct HsScenario {
    config: ScenarioConfig,
}

/// The trace of a finished (or aborted) run.
pub struct HsTrace {
    log: TraceLog,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let mut bytes = msg.into().into_bytes();
    bytes.retain(|b| *b != 0);
    let c = CString::new(bytes).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(HsStatus, String);

impl From<RunError> for Fail {
    fn from(e: RunError) -> Self {
        let status = match e.exit_code() {
            4 => HsStatus::BudgetExhausted,
            5 => HsStatus::UnknownPlan,
            6 => HsStatus::UncontrollableAxis,
            7 => HsStatus::Io,
            _ => HsStatus::Config,
        };
        Fail(status, e.to_string())
    }
}

impl From<ContinuousError> for Fail {
    fn from(e: ContinuousError) -> Self {
        let status = match e {
            ContinuousError::SingularHorizon { .. } => HsStatus::SingularHorizon,
            ContinuousError::UncontrollableAxis(_) => HsStatus::UncontrollableAxis,
            _ => HsStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HsStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(HsStatus::NullArgument, format!("{what} is NULL"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(HsStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn state_arg(p: *const f64) -> Result<StateVector, Fail> {
    if p.is_null() {
        return Err(null("state"));
    }
    let mut a = [0.0; 6];
    a.copy_from_slice(std::slice::from_raw_parts(p, 6));
    Ok(StateVector::from_array(a))
}

fn mean_motion(n: f64) -> Result<MeanMotion, Fail> {
    MeanMotion::new(n).ok_or_else(|| Fail(HsStatus::InvalidArgument, format!("invalid mean motion {n}")))
}

fn into_c_string(s: String) -> *mut c_char {
    let mut bytes = s.into_bytes();
    bytes.retain(|b| *b != 0);
    CString::new(bytes).expect("interior NULs removed").into_raw()
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn hs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- plan programs ---------------------------------------------------

/// Parse plan-language source text.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_program_parse(source: *const c_char, out: *mut *mut HsProgram) -> HsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let text = str_arg(source, "source")?;
        let plans = lang::parse_program(text).map_err(|e| Fail(HsStatus::Config, e.to_string()))?;
        *out = Box::into_raw(Box::new(HsProgram { plans }));
        Ok(())
    })
}

/// Number of plans in a program.
///
/// # Safety
/// `program` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_program_plan_count(program: *const HsProgram, out: *mut usize) -> HsStatus {
    guard(|| {
        let p = ref_arg(program, "program")?;
        *out_arg(out, "out")? = p.plans.len();
        Ok(())
    })
}

/// Canonical source text of a program; free with [`hs_string_free`].
///
/// # Safety
/// `program` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_program_print(program: *const HsProgram, out: *mut *mut c_char) -> HsStatus {
    guard(|| {
        let p = ref_arg(program, "program")?;
        let out = out_arg(out, "out")?;
        *out = into_c_string(lang::pretty_print(&p.plans));
        Ok(())
    })
}

/// Release a program. NULL is ignored.
///
/// # Safety
/// `program` must come from [`hs_program_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hs_program_free(program: *mut HsProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

// ---- scenarios and traces -------------------------------------------

/// Load a scenario file. Program paths inside it resolve relative to
/// the file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_scenario_load(path: *const c_char, out: *mut *mut HsScenario) -> HsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let config = ScenarioConfig::load(Path::new(path))?;
        *out = Box::into_raw(Box::new(HsScenario { config }));
        Ok(())
    })
}

/// Override the disturbance seed.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_scenario_set_seed(scenario: *mut HsScenario, seed: u64) -> HsStatus {
    guard(|| {
        out_arg(scenario, "scenario")?.config.set_seed(seed);
        Ok(())
    })
}

/// Run a scenario to completion.
///
/// A trace handle is stored in `out` whenever the run started, including
/// runs that stopped on a fatal error; the status reports that error.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_scenario_run(scenario: *const HsScenario, out: *mut *mut HsTrace) -> HsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let s = ref_arg(scenario, "scenario")?;
        let outcome = orchestrator::run_scenario(&s.config);
        *out = Box::into_raw(Box::new(HsTrace { log: outcome.trace }));
        match outcome.error {
            Some(e) => Err(e.into()),
            None => Ok(()),
        }
    })
}

/// Release a scenario. NULL is ignored.
///
/// # Safety
/// `scenario` must come from [`hs_scenario_load`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hs_scenario_free(scenario: *mut HsScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of simulated ticks in a trace.
///
/// # Safety
/// `trace` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_trace_tick_count(trace: *const HsTrace, out: *mut usize) -> HsStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(trace, "trace")?.log.ticks.len();
        Ok(())
    })
}

/// The replayable JSON-lines trace; free with [`hs_string_free`].
///
/// # Safety
/// `trace` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_trace_jsonl(trace: *const HsTrace, out: *mut *mut c_char) -> HsStatus {
    guard(|| {
        let t = ref_arg(trace, "trace")?;
        let mut text = t.log.trace_lines().join("\n");
        text.push('\n');
        *out_arg(out, "out")? = into_c_string(text);
        Ok(())
    })
}

/// The simulator CSV log; free with [`hs_string_free`].
///
/// # Safety
/// `trace` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_trace_sim_csv(trace: *const HsTrace, out: *mut *mut c_char) -> HsStatus {
    guard(|| {
        let t = ref_arg(trace, "trace")?;
        *out_arg(out, "out")? = into_c_string(t.log.sim_csv());
        Ok(())
    })
}

/// Write all output files of a run into `dir`, creating it if needed.
///
/// # Safety
/// `trace` must be a live handle; `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hs_trace_write(trace: *const HsTrace, dir: *const c_char) -> HsStatus {
    guard(|| {
        let t = ref_arg(trace, "trace")?;
        let dir = str_arg(dir, "dir")?;
        t.log.write_to_dir(Path::new(dir))?;
        Ok(())
    })
}

/// Release a trace. NULL is ignored.
///
/// # Safety
/// `trace` must come from [`hs_scenario_run`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hs_trace_free(trace: *mut HsTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

// ---- continuous engine ----------------------------------------------

/// Closed-form CW propagation of `state` by `t` seconds at mean motion
/// `n` (rad/s). `out` may alias `state`.
///
/// # Safety
/// `state` and `out` must point to 6 doubles.
#[no_mangle]
pub unsafe extern "C" fn hs_cw_transition(state: *const f64, t: f64, n: f64, out: *mut f64) -> HsStatus {
    guard(|| {
        let s = state_arg(state)?;
        let n = mean_motion(n)?;
        if !t.is_finite() {
            return Err(Fail(HsStatus::InvalidArgument, format!("invalid time {t}")));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let r = continuous::cw_transition(&s, t, n).to_array();
        std::slice::from_raw_parts_mut(out, 6).copy_from_slice(&r);
        Ok(())
    })
}

/// Two-impulse transfer from `state` to the origin in `horizon` seconds.
/// Writes the departure and arrival delta-v, 3 doubles each.
///
/// # Safety
/// `state` must point to 6 doubles; `dv1` and `dv2` to 3 each.
#[no_mangle]
pub unsafe extern "C" fn hs_solve_two_impulse(
    state: *const f64,
    horizon: f64,
    n: f64,
    dv1: *mut f64,
    dv2: *mut f64,
) -> HsStatus {
    guard(|| {
        let s = state_arg(state)?;
        let n = mean_motion(n)?;
        if dv1.is_null() || dv2.is_null() {
            return Err(null("dv1/dv2"));
        }
        let (a, b) = continuous::solve_two_impulse(&s, horizon, n)?;
        std::slice::from_raw_parts_mut(dv1, 3).copy_from_slice(a.as_slice());
        std::slice::from_raw_parts_mut(dv2, 3).copy_from_slice(b.as_slice());
        Ok(())
    })
}

/// Whether `state` lies inside the deadband sphere of `radius` metres.
///
/// # Safety
/// `state` must point to 6 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_comp_distance(state: *const f64, radius: f64, out: *mut HsProximity) -> HsStatus {
    guard(|| {
        let s = state_arg(state)?;
        let bounds =
            BoundsSpec::new(radius).ok_or_else(|| Fail(HsStatus::InvalidArgument, format!("invalid radius {radius}")))?;
        *out_arg(out, "out")? = match continuous::comp_distance(&s, &bounds)? {
            Proximity::In => HsProximity::In,
            Proximity::Out => HsProximity::Out,
        };
        Ok(())
    })
}
