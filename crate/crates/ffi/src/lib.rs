//! C interface to the hyper-toffoli simulator.
//!
//! Every function returns an [`HtStatus`]. On failure a description is kept
//! per thread and can be read with [`ht_last_error`]. Scenarios and outcomes
//! are opaque handles released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use hyper_toffoli::analysis::config::{parse_scenario, ScenarioConfig};
use hyper_toffoli::analysis::metrics::{conditional_fidelity, eta_d, eta_t};
use hyper_toffoli::analysis::rus::{repeat_until_success, GateChannel};
use hyper_toffoli::analysis::sweep::{run_sweep, write_csv_file};
use hyper_toffoli::analysis::AnalysisError;
use hyper_toffoli::circuits::{GateOutcome, GateProgram};
use hyper_toffoli::state::{ProductInput, PHOTONIC_DIM};
use hyper_toffoli::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Physics = 4,
    /// A numerical invariant did not hold.
    Invariant = 5,
    /// No amplitude survived the gate.
    Aborted = 6,
    OutOfRange = 7,
    Io = 8,
    Panic = 9,
}

/// A parsed scenario.
pub struct HtScenario {
    config: ScenarioConfig,
}

/// Every outcome branch of one gate run.
pub struct HtOutcome {
    input: ProductInput,
    branches: Vec<GateOutcome>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: HtStatus, msg: impl Into<String>) -> HtStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> HtStatus {
    match e {
        Error::Config(_) => HtStatus::Config,
        Error::Physics(_) => HtStatus::Physics,
        Error::Analysis(AnalysisError::Io { .. }) => HtStatus::Io,
        _ => match e.exit_code() {
            1 => HtStatus::Config,
            3 => HtStatus::Aborted,
            _ => HtStatus::Invariant,
        },
    }
}

fn guard(f: impl FnOnce() -> Result<(), HtStatus>) -> HtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HtStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(HtStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: Result<T, impl Into<Error>>) -> Result<T, HtStatus> {
    r.map_err(|e| {
        let e = e.into();
        fail(status_of(&e), e.to_string())
    })
}

unsafe fn text<'a>(ptr: *const c_char) -> Result<&'a str, HtStatus> {
    if ptr.is_null() {
        return Err(fail(HtStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| fail(HtStatus::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn handle<'a, T>(ptr: *const T) -> Result<&'a T, HtStatus> {
    ptr.as_ref().ok_or_else(|| fail(HtStatus::NullPointer, "null handle"))
}

unsafe fn slot<'a, T>(ptr: *mut T) -> Result<&'a mut T, HtStatus> {
    ptr.as_mut().ok_or_else(|| fail(HtStatus::NullPointer, "null output pointer"))
}

fn branch(outcome: &HtOutcome, index: usize) -> Result<&GateOutcome, HtStatus> {
    outcome
        .branches
        .get(index)
        .ok_or_else(|| fail(HtStatus::OutOfRange, format!("branch {index} of {}", outcome.branches.len())))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ht_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses scenario text (the same `key = value` format the CLI reads).
///
/// # Safety
/// `text_ptr` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ht_scenario_parse(text_ptr: *const c_char, out: *mut *mut HtScenario) -> HtStatus {
    guard(|| {
        let out = slot(out)?;
        *out = std::ptr::null_mut();
        let config = lift(parse_scenario(text(text_ptr)?))?;
        *out = Box::into_raw(Box::new(HtScenario { config }));
        Ok(())
    })
}

/// Reads and parses a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ht_scenario_load(path: *const c_char, out: *mut *mut HtScenario) -> HtStatus {
    guard(|| {
        let out = slot(out)?;
        *out = std::ptr::null_mut();
        let config = lift(ScenarioConfig::load(Path::new(text(path)?)))?;
        *out = Box::into_raw(Box::new(HtScenario { config }));
        Ok(())
    })
}

/// # Safety
/// `scenario` must come from `ht_scenario_parse`/`ht_scenario_load` and not
/// be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ht_scenario_free(scenario: *mut HtScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Transmission and detection efficiencies of the scenario's cavity.
///
/// # Safety
/// `scenario` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_scenario_efficiencies(
    scenario: *const HtScenario,
    eta_t_out: *mut f64,
    eta_d_out: *mut f64,
) -> HtStatus {
    guard(|| {
        let s = handle(scenario)?;
        let (t_out, d_out) = (slot(eta_t_out)?, slot(eta_d_out)?);
        let pair = lift(s.config.pair())?;
        *t_out = eta_t(&pair);
        *d_out = eta_d(&pair);
        Ok(())
    })
}

/// Runs the scenario's gate with its measurement mode.
///
/// # Safety
/// `scenario` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ht_run(scenario: *const HtScenario, out: *mut *mut HtOutcome) -> HtStatus {
    guard(|| {
        let s = handle(scenario)?;
        let out = slot(out)?;
        *out = std::ptr::null_mut();
        let pair = lift(s.config.pair())?;
        let input = s.config.input();
        let branches = lift(GateProgram::new(s.config.variant, pair).run(&input, &s.config.mode))?;
        *out = Box::into_raw(Box::new(HtOutcome { input, branches }));
        Ok(())
    })
}

/// # Safety
/// `outcome` must come from `ht_run` and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn ht_outcome_free(outcome: *mut HtOutcome) {
    if !outcome.is_null() {
        drop(Box::from_raw(outcome));
    }
}

/// # Safety
/// `outcome` must be a live handle and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_outcome_branch_count(outcome: *const HtOutcome, count: *mut usize) -> HtStatus {
    guard(|| {
        *slot(count)? = handle(outcome)?.branches.len();
        Ok(())
    })
}

/// Probability that the photons leave the gate without a detector click or
/// a loss. The same for every branch.
///
/// # Safety
/// `outcome` must be a live handle and `p` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_outcome_success_probability(outcome: *const HtOutcome, p: *mut f64) -> HtStatus {
    guard(|| {
        let o = handle(outcome)?;
        *slot(p)? = branch(o, 0)?.success_probability;
        Ok(())
    })
}

/// Heralded and silently lost probability mass of the run.
///
/// # Safety
/// `outcome` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_outcome_failure_mass(
    outcome: *const HtOutcome,
    heralded: *mut f64,
    lost: *mut f64,
) -> HtStatus {
    guard(|| {
        let o = handle(outcome)?;
        let (h, l) = (slot(heralded)?, slot(lost)?);
        let b = branch(o, 0)?;
        *h = b.heralded_mass();
        *l = b.loss;
        Ok(())
    })
}

/// Probability of one spin-outcome branch given success.
///
/// # Safety
/// `outcome` must be a live handle and `p` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_outcome_branch_probability(
    outcome: *const HtOutcome,
    index: usize,
    p: *mut f64,
) -> HtStatus {
    guard(|| {
        let o = handle(outcome)?;
        *slot(p)? = branch(o, index)?.branch_probability;
        Ok(())
    })
}

/// Fidelity of one branch's photonic state against the ideal gate output.
///
/// # Safety
/// `outcome` must be a live handle and `fidelity` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_outcome_fidelity(outcome: *const HtOutcome, index: usize, fidelity: *mut f64) -> HtStatus {
    guard(|| {
        let o = handle(outcome)?;
        *slot(fidelity)? = lift(conditional_fidelity(branch(o, index)?, &o.input))?;
        Ok(())
    })
}

/// Writes the 64 photonic amplitudes of one branch as interleaved
/// `re, im` pairs into `buffer`, which must hold `len >= 128` doubles.
///
/// # Safety
/// `outcome` must be a live handle and `buffer` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn ht_outcome_amplitudes(
    outcome: *const HtOutcome,
    index: usize,
    buffer: *mut f64,
    len: usize,
) -> HtStatus {
    guard(|| {
        let o = handle(outcome)?;
        if buffer.is_null() {
            return Err(fail(HtStatus::NullPointer, "null buffer"));
        }
        if len < 2 * PHOTONIC_DIM {
            return Err(fail(HtStatus::OutOfRange, format!("buffer holds {len} doubles, need {}", 2 * PHOTONIC_DIM)));
        }
        let (amps, _) = lift(branch(o, index)?.conditional_state.photonic_amplitudes())?;
        let dst = std::slice::from_raw_parts_mut(buffer, 2 * PHOTONIC_DIM);
        for (pair, a) in dst.chunks_exact_mut(2).zip(amps) {
            pair[0] = a.re;
            pair[1] = a.im;
        }
        Ok(())
    })
}

/// Repeat-until-success estimate with at most `rounds` attempts per trial.
///
/// # Safety
/// `scenario` must be a live handle and `estimate` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_rus_estimate(
    scenario: *const HtScenario,
    rounds: u32,
    trials: u64,
    estimate: *mut f64,
) -> HtStatus {
    guard(|| {
        let s = handle(scenario)?;
        let out = slot(estimate)?;
        let pair = lift(s.config.pair())?;
        let program = GateProgram::new(s.config.variant, pair);
        let channel = lift(GateChannel::simulate(&program, &s.config.input()))?;
        *out = lift(repeat_until_success(&channel, rounds, s.config.seed, trials))?.estimate;
        Ok(())
    })
}

/// Runs the scenario's coupling sweep and writes the CSV to `path`. A
/// scenario without a grid sweeps its single coupling value.
///
/// # Safety
/// `scenario` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ht_sweep_to_csv(scenario: *const HtScenario, path: *const c_char) -> HtStatus {
    guard(|| {
        let s = handle(scenario)?;
        let path = Path::new(text(path)?);
        let mut config = s.config.clone();
        if config.sweep.is_none() {
            config.sweep = Some(hyper_toffoli::analysis::config::SweepGrid::List(vec![config.g_over_kappa]));
        }
        let spec = config.sweep_spec().ok_or_else(|| fail(HtStatus::Config, "no sweep grid"))?;
        let rows = lift(run_sweep(&spec))?;
        lift(write_csv_file(&rows, path))
    })
}
