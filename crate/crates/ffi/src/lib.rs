//! C ABI for the adiabatic covariance root finding library.
//!
//! Conventions: objects cross the boundary as opaque handles owned by Rust;
//! every fallible call returns an [`AcvStatus`] and writes results through
//! out-pointers; `acv_last_error_message` returns a thread-local description
//! of the most recent failure. Strings returned through out-pointers must be
//! released with `acv_string_free`, handles with their matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use adiabatic_covar::harness::{run_experiment, ExperimentConfig};
use adiabatic_covar::morph::{adiabatic_covar_run, AdiabaticOptions, Trajectory};
use adiabatic_covar::oracle::diagonalize;
use adiabatic_covar::pauli::PauliSum;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcvStatus {
    AcvOk = 0,
    AcvNullPointer = 1,
    AcvInvalidUtf8 = 2,
    AcvParseError = 3,
    AcvInvalidArgument = 4,
    AcvRunError = 5,
    AcvCapacityError = 6,
    AcvIndexOutOfRange = 7,
    AcvPanic = 8,
}

/// Opaque Hamiltonian handle (a canonicalized weighted Pauli sum).
pub struct AcvHamiltonian {
    inner: PauliSum,
}

/// Opaque trajectory handle from an adiabatic run.
pub struct AcvTrajectory {
    inner: Trajectory,
}

/// One trajectory row in plain C terms. `delta_e` is NaN and `level_index`
/// is -1 when the run tracked no oracle.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AcvTrajectoryRecord {
    pub t: f64,
    pub step_index: u64,
    pub inner_iterations: u64,
    pub energy: f64,
    pub f_norm: f64,
    pub delta_e: f64,
    pub level_index: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).unwrap_or_default();
    });
}

fn guard<F: FnOnce() -> AcvStatus>(f: F) -> AcvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            AcvStatus::AcvPanic
        }
    }
}

/// # Safety
/// `text` must be a valid NUL-terminated string pointer.
unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, AcvStatus> {
    if text.is_null() {
        set_error("null string pointer");
        return Err(AcvStatus::AcvNullPointer);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        AcvStatus::AcvInvalidUtf8
    })
}

fn hand_out_string(value: String, out: *mut *mut c_char) -> AcvStatus {
    if out.is_null() {
        set_error("null out pointer");
        return AcvStatus::AcvNullPointer;
    }
    match CString::new(value) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            AcvStatus::AcvOk
        }
        Err(_) => {
            set_error("string contains interior NUL");
            AcvStatus::AcvInvalidArgument
        }
    }
}

/// Library version as a static string; never freed by the caller.
#[no_mangle]
pub extern "C" fn acv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Description of the most recent failure on this thread; never freed by the
/// caller and overwritten by the next failing call.
#[no_mangle]
pub extern "C" fn acv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Release a string returned through an out-pointer.
///
/// # Safety
/// `s` must be a pointer previously handed out by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn acv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a Hamiltonian from the textual format (`<re> <im> <word>` lines).
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn acv_hamiltonian_from_text(
    text: *const c_char,
    out: *mut *mut AcvHamiltonian,
) -> AcvStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return AcvStatus::AcvNullPointer;
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match PauliSum::from_text(text) {
            Ok(sum) => {
                *out = Box::into_raw(Box::new(AcvHamiltonian { inner: sum }));
                AcvStatus::AcvOk
            }
            Err(e) => {
                set_error(e.to_string());
                AcvStatus::AcvParseError
            }
        }
    })
}

/// Serialize a Hamiltonian back to the textual format.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acv_hamiltonian_to_text(
    h: *const AcvHamiltonian,
    out: *mut *mut c_char,
) -> AcvStatus {
    guard(|| {
        let Some(h) = h.as_ref() else {
            set_error("null hamiltonian handle");
            return AcvStatus::AcvNullPointer;
        };
        hand_out_string(h.inner.to_text(), out)
    })
}

/// Number of qubits (0 on a null handle).
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn acv_hamiltonian_num_qubits(h: *const AcvHamiltonian) -> usize {
    h.as_ref().map(|h| h.inner.num_qubits()).unwrap_or(0)
}

/// Number of canonicalized terms (0 on a null handle).
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn acv_hamiltonian_num_terms(h: *const AcvHamiltonian) -> usize {
    h.as_ref().map(|h| h.inner.num_terms()).unwrap_or(0)
}

/// Exact ground energy via dense diagonalization (at most 14 qubits).
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acv_hamiltonian_ground_energy(
    h: *const AcvHamiltonian,
    out: *mut f64,
) -> AcvStatus {
    guard(|| {
        let Some(h) = h.as_ref() else {
            set_error("null hamiltonian handle");
            return AcvStatus::AcvNullPointer;
        };
        if out.is_null() {
            set_error("null out pointer");
            return AcvStatus::AcvNullPointer;
        }
        match diagonalize(&h.inner, false) {
            Ok(spectrum) => {
                *out = spectrum.ground_energy();
                AcvStatus::AcvOk
            }
            Err(e) => {
                set_error(e.to_string());
                AcvStatus::AcvCapacityError
            }
        }
    })
}

/// Release a Hamiltonian handle.
///
/// # Safety
/// `h` must be null or a live handle; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn acv_hamiltonian_free(h: *mut AcvHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Run the adiabatic covariance solver described by an experiment config
/// JSON (the CLI `run` schema) entirely in memory: the first seed and step
/// size are used and no files are written.
///
/// # Safety
/// `config_json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acv_adiabatic_run(
    config_json: *const c_char,
    out: *mut *mut AcvTrajectory,
) -> AcvStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return AcvStatus::AcvNullPointer;
        }
        let text = match read_str(config_json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let config = match ExperimentConfig::from_json(text) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return AcvStatus::AcvParseError;
            }
        };
        let seed = config.seeds[0];
        let dt = match config.resolve_delta_ts() {
            Ok(list) => list[0],
            Err(e) => {
                set_error(e.to_string());
                return AcvStatus::AcvParseError;
            }
        };
        let run = (|| -> adiabatic_covar::Result<Trajectory> {
            let (_, schedule, circuit) = config.instantiate(seed, dt)?;
            let options = AdiabaticOptions {
                final_max_iterations: config.outer.final_max_iterations,
                final_covariance_norm_tol: config.outer.final_covariance_norm_tol,
                parameter_jitter_std: config.outer.parameter_jitter_std,
                vqe_head_start: config.outer.vqe_head_start,
                vqe_head_start_rate: config.outer.vqe_head_start_rate,
                track_oracle: config.oracle,
            };
            let lm = config.lm_for_seed(seed);
            Ok(adiabatic_covar_run(&schedule, &circuit, config.level, &lm, &options)?)
        })();
        match run {
            Ok(trajectory) => {
                *out = Box::into_raw(Box::new(AcvTrajectory { inner: trajectory }));
                AcvStatus::AcvOk
            }
            Err(e) => {
                set_error(e.to_string());
                AcvStatus::AcvRunError
            }
        }
    })
}

/// Execute a full experiment config (all seeds and step sizes, files written
/// to its output directory) and hand back the metadata report as JSON.
///
/// # Safety
/// `config_json` must be NUL-terminated; `report_json_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acv_run_experiment_json(
    config_json: *const c_char,
    report_json_out: *mut *mut c_char,
) -> AcvStatus {
    guard(|| {
        let text = match read_str(config_json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let config = match ExperimentConfig::from_json(text) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return AcvStatus::AcvParseError;
            }
        };
        match run_experiment(&config) {
            Ok(report) => hand_out_string(
                serde_json::to_string(&report).expect("report serializes"),
                report_json_out,
            ),
            Err(e) => {
                set_error(e.to_string());
                AcvStatus::AcvRunError
            }
        }
    })
}

/// Number of records in a trajectory (0 on a null handle).
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn acv_trajectory_num_records(t: *const AcvTrajectory) -> usize {
    t.as_ref().map(|t| t.inner.records.len()).unwrap_or(0)
}

/// Copy one trajectory row into a caller-owned struct.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acv_trajectory_record(
    t: *const AcvTrajectory,
    index: usize,
    out: *mut AcvTrajectoryRecord,
) -> AcvStatus {
    guard(|| {
        let Some(t) = t.as_ref() else {
            set_error("null trajectory handle");
            return AcvStatus::AcvNullPointer;
        };
        if out.is_null() {
            set_error("null out pointer");
            return AcvStatus::AcvNullPointer;
        }
        let Some(r) = t.inner.records.get(index) else {
            set_error(format!(
                "record {index} out of range for {} records",
                t.inner.records.len()
            ));
            return AcvStatus::AcvIndexOutOfRange;
        };
        *out = AcvTrajectoryRecord {
            t: r.t,
            step_index: r.step_index as u64,
            inner_iterations: r.covar_iters as u64,
            energy: r.energy,
            f_norm: r.f_norm,
            delta_e: r.delta_e.unwrap_or(f64::NAN),
            level_index: r.level_index.map(|v| v as i64).unwrap_or(-1),
        };
        AcvStatus::AcvOk
    })
}

/// Render a trajectory as CSV (the on-disk schema).
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acv_trajectory_to_csv(
    t: *const AcvTrajectory,
    out: *mut *mut c_char,
) -> AcvStatus {
    guard(|| {
        let Some(t) = t.as_ref() else {
            set_error("null trajectory handle");
            return AcvStatus::AcvNullPointer;
        };
        hand_out_string(t.inner.to_csv(), out)
    })
}

/// Release a trajectory handle.
///
/// # Safety
/// `t` must be null or a live handle; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn acv_trajectory_free(t: *mut AcvTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}
