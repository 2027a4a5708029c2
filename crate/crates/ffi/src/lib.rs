//! C ABI over the simulator.
//!
//! Handles are opaque and owned by the caller: every `*_parse`/`*_load`/
//! `qcs_run` success must be paired with the matching `*_free`. Strings
//! returned through `char **` out-parameters are heap allocated by the library
//! and released with [`qcs_string_free`]. Every function returns a
//! [`QcsStatus`]; on failure a description is available from
//! [`qcs_last_error`] on the same thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qcloudsim::domain::{self, ClopsParams};
use qcloudsim::results::results_to_string;
use qcloudsim::runner::{run_scenario, RunReport};
use qcloudsim::scenario::{parse_scenario, Scenario, ScenarioError};
use qcloudsim::{LogLevel, QuletStatus};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcsStatus {
    Ok = 0,
    NullArgument = 1,
    /// Malformed document or missing/mistyped field.
    Syntax = 2,
    /// Document is well formed but violates a model invariant.
    Semantic = 3,
    Io = 4,
    /// Argument outside the domain of a formula.
    Domain = 5,
    InvalidUtf8 = 6,
    Panic = 7,
    Simulation = 8,
    NotFound = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcsLogLevel {
    Events = 1,
    Debug = 2,
}

/// Status of one qulet in a finished run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcsQuletStatus {
    Pending = 0,
    Success = 1,
    Failed = 2,
    Skipped = 3,
}

/// Per-qulet outcome. `node_id` is -1 when the qulet was never placed.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcsQuletOutcome {
    pub qulet_id: u32,
    pub status: QcsQuletStatus,
    pub node_id: i64,
    pub t_n: f64,
    pub t_c: f64,
    pub t_s: f64,
    pub t_w: f64,
    pub t_q: f64,
    pub total: f64,
    pub cost: f64,
}

/// A parsed and validated scenario.
pub struct QcsScenario {
    inner: Scenario,
}

/// Outcome of a simulation run.
pub struct QcsRunResult {
    inner: RunReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

fn fail(status: QcsStatus, message: impl Into<String>) -> QcsStatus {
    set_error(message);
    status
}

fn guard(f: impl FnOnce() -> QcsStatus) -> QcsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == QcsStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(QcsStatus::Panic, "internal panic"),
    }
}

unsafe fn input_str<'a>(text: *const c_char) -> Result<&'a str, QcsStatus> {
    if text.is_null() {
        return Err(fail(QcsStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| fail(QcsStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

fn scenario_status(e: &ScenarioError) -> QcsStatus {
    match e {
        ScenarioError::Syntax(_) | ScenarioError::Schema(_) => QcsStatus::Syntax,
        ScenarioError::Semantic(_) => QcsStatus::Semantic,
    }
}

unsafe fn put_string(text: String, out: *mut *mut c_char) -> QcsStatus {
    match CString::new(text) {
        Ok(c) => {
            *out = c.into_raw();
            QcsStatus::Ok
        }
        Err(_) => fail(QcsStatus::InvalidUtf8, "output contains a nul byte"),
    }
}

/// Message describing the last failure on this thread; empty after a
/// success. The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn qcs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a scenario document. On success `*out` receives a new handle.
#[no_mangle]
pub unsafe extern "C" fn qcs_scenario_parse(text: *const c_char, out: *mut *mut QcsScenario) -> QcsStatus {
    guard(|| {
        if out.is_null() {
            return fail(QcsStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match input_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_scenario(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(QcsScenario { inner }));
                QcsStatus::Ok
            }
            Err(e) => fail(scenario_status(&e), e.to_string()),
        }
    })
}

/// Reads and parses a scenario file.
#[no_mangle]
pub unsafe extern "C" fn qcs_scenario_load(path: *const c_char, out: *mut *mut QcsScenario) -> QcsStatus {
    guard(|| {
        if out.is_null() {
            return fail(QcsStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let path = match input_str(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(QcsStatus::Io, format!("cannot read {path}: {e}")),
        };
        match parse_scenario(&text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(QcsScenario { inner }));
                QcsStatus::Ok
            }
            Err(e) => fail(scenario_status(&e), e.to_string()),
        }
    })
}

/// Releases a scenario handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qcs_scenario_free(scenario: *mut QcsScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

#[no_mangle]
pub unsafe extern "C" fn qcs_scenario_qulet_count(scenario: *const QcsScenario, out: *mut usize) -> QcsStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            return fail(QcsStatus::NullArgument, "null argument");
        }
        *out = (&*scenario).inner.qulets.len();
        QcsStatus::Ok
    })
}

/// Runs the scenario. When `use_seed` is true, `seed` replaces the
/// scenario's seed.
#[no_mangle]
pub unsafe extern "C" fn qcs_run(
    scenario: *const QcsScenario,
    use_seed: bool,
    seed: u64,
    out: *mut *mut QcsRunResult,
) -> QcsStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            return fail(QcsStatus::NullArgument, "null argument");
        }
        *out = ptr::null_mut();
        let seed = use_seed.then_some(seed);
        match run_scenario(&(&*scenario).inner, seed) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(QcsRunResult { inner }));
                QcsStatus::Ok
            }
            Err(e) => fail(QcsStatus::Simulation, e.to_string()),
        }
    })
}

/// Releases a run result. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qcs_run_result_free(result: *mut QcsRunResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

#[no_mangle]
pub unsafe extern "C" fn qcs_run_makespan(result: *const QcsRunResult, out: *mut f64) -> QcsStatus {
    guard(|| {
        if result.is_null() || out.is_null() {
            return fail(QcsStatus::NullArgument, "null argument");
        }
        *out = (&*result).inner.makespan;
        QcsStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn qcs_run_qulet_count(result: *const QcsRunResult, out: *mut usize) -> QcsStatus {
    guard(|| {
        if result.is_null() || out.is_null() {
            return fail(QcsStatus::NullArgument, "null argument");
        }
        *out = (&*result).inner.results.len();
        QcsStatus::Ok
    })
}

/// Outcome of the qulet at position `index` (results are ordered by id).
#[no_mangle]
pub unsafe extern "C" fn qcs_run_qulet(
    result: *const QcsRunResult,
    index: usize,
    out: *mut QcsQuletOutcome,
) -> QcsStatus {
    guard(|| {
        if result.is_null() || out.is_null() {
            return fail(QcsStatus::NullArgument, "null argument");
        }
        let Some(r) = (&*result).inner.results.get(index) else {
            return fail(QcsStatus::NotFound, format!("no qulet at index {index}"));
        };
        let b = r.breakdown;
        *out = QcsQuletOutcome {
            qulet_id: r.qulet_id,
            status: match r.status {
                QuletStatus::Success => QcsQuletStatus::Success,
                QuletStatus::Failed => QcsQuletStatus::Failed,
                QuletStatus::Skipped => QcsQuletStatus::Skipped,
                _ => QcsQuletStatus::Pending,
            },
            node_id: r.node_id.map_or(-1, i64::from),
            t_n: b.t_n,
            t_c: b.t_c,
            t_s: b.t_s,
            t_w: b.t_w,
            t_q: b.t_q,
            total: b.total,
            cost: r.cost,
        };
        QcsStatus::Ok
    })
}

/// Event log text, one line per event. Free with [`qcs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qcs_run_event_log(
    result: *const QcsRunResult,
    level: QcsLogLevel,
    out: *mut *mut c_char,
) -> QcsStatus {
    guard(|| {
        if result.is_null() || out.is_null() {
            return fail(QcsStatus::NullArgument, "null argument");
        }
        let level = match level {
            QcsLogLevel::Events => LogLevel::Events,
            QcsLogLevel::Debug => LogLevel::Debug,
        };
        put_string((&*result).inner.log.to_text(level), out)
    })
}

/// Results file contents (CSV with summary). Free with [`qcs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qcs_run_results_csv(result: *const QcsRunResult, out: *mut *mut c_char) -> QcsStatus {
    guard(|| {
        if result.is_null() || out.is_null() {
            return fail(QcsStatus::NullArgument, "null argument");
        }
        put_string(results_to_string(&(&*result).inner), out)
    })
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qcs_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// `2^min(depth, width)`.
#[no_mangle]
pub unsafe extern "C" fn qcs_quantum_volume(depth: u32, width: u32, out: *mut u64) -> QcsStatus {
    guard(|| {
        if out.is_null() {
            return fail(QcsStatus::NullArgument, "null output pointer");
        }
        match domain::quantum_volume(depth, width) {
            Ok(v) => {
                *out = v;
                QcsStatus::Ok
            }
            Err(e) => fail(QcsStatus::Domain, e.to_string()),
        }
    })
}

/// CLOPS with the default benchmark parameters (100 templates, 10
/// updates, 100 shots).
#[no_mangle]
pub unsafe extern "C" fn qcs_clops(quantum_volume: u64, time_taken: f64, out: *mut f64) -> QcsStatus {
    guard(|| {
        if out.is_null() {
            return fail(QcsStatus::NullArgument, "null output pointer");
        }
        match domain::clops(quantum_volume, time_taken, ClopsParams::default()) {
            Ok(v) => {
                *out = v;
                QcsStatus::Ok
            }
            Err(e) => fail(QcsStatus::Domain, e.to_string()),
        }
    })
}

/// Execution time of `depth` layers times `shots` at `clops`.
#[no_mangle]
pub unsafe extern "C" fn qcs_quantum_time(depth: u64, shots: u64, clops: f64, out: *mut f64) -> QcsStatus {
    guard(|| {
        if out.is_null() {
            return fail(QcsStatus::NullArgument, "null output pointer");
        }
        if !(clops.is_finite() && clops > 0.0) {
            return fail(QcsStatus::Domain, format!("clops must be positive, got {clops}"));
        }
        *out = domain::quantum_time(depth as f64, shots, clops);
        QcsStatus::Ok
    })
}
