//! C interface to the `entbell` simulator.
//!
//! Every fallible function returns an [`EbStatus`] and writes its result
//! through an out-pointer. On failure, [`eb_last_error_message`] describes
//! the most recent error on the calling thread. Angles are in radians.
//!
//! Prepared states are opaque [`EbPrepared`] handles created by
//! `eb_prepared_new*` and released with [`eb_prepared_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use entbell::experiment::{correlation_exact, outcome_probabilities, prepare_calibrated, prepare_state, PreparedState};
use entbell::stats::{
    chsh, correlation_from_counts, critical_visibility, fit_visibility, lhv_max_chsh, simulate_counts,
    CorrelationEstimate, NoiseModel, SettingCounts,
};
use entbell::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    EmptyPostSelection = 3,
    CalibrationFailed = 4,
    ZeroCounts = 5,
    FitFailed = 6,
    Internal = 7,
}

impl From<&Error> for EbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::EmptyPostSelection(_) => EbStatus::EmptyPostSelection,
            Error::CalibrationFailed => EbStatus::CalibrationFailed,
            Error::ZeroCounts => EbStatus::ZeroCounts,
            Error::TooFewAngles(_) | Error::DegenerateFit => EbStatus::FitFailed,
            Error::VisibilityOutOfRange(_) | Error::InvalidDistribution(_) | Error::Config(_) => {
                EbStatus::InvalidArgument
            }
            _ => EbStatus::Internal,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: EbStatus, msg: impl Into<String>) -> EbStatus {
    set_error(msg);
    status
}

/// Runs `f`, mapping library errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<EbStatus, Error>) -> EbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => fail(EbStatus::from(&e), e.to_string()),
        Err(_) => fail(EbStatus::Internal, "panic inside entbell"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(EbStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Message for the last failed call on this thread. Empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn eb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn eb_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => c"",
    };
    VERSION.as_ptr()
}

/// Opaque handle to a prepared three-photon state.
pub struct EbPrepared(PreparedState);

/// Prepares the state with the calibrated wave-plate settings.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn eb_prepared_new_calibrated(out: *mut *mut EbPrepared) -> EbStatus {
    non_null!(out);
    guard(|| {
        let p = prepare_calibrated()?;
        *out = Box::into_raw(Box::new(EbPrepared(p)));
        Ok(EbStatus::Ok)
    })
}

/// Prepares the state from four quarter-wave plate angles on `(T, a, b1, b2)`
/// and the phase applied to mode `a`.
///
/// # Safety
/// `qwp_angles` must point to 4 readable doubles; `out` as for
/// [`eb_prepared_new_calibrated`].
#[no_mangle]
pub unsafe extern "C" fn eb_prepared_new(
    qwp_angles: *const f64,
    calibration_phase: f64,
    out: *mut *mut EbPrepared,
) -> EbStatus {
    non_null!(qwp_angles, out);
    let angles: [f64; 4] = std::ptr::read(qwp_angles as *const [f64; 4]);
    if angles.iter().chain([&calibration_phase]).any(|a| !a.is_finite()) {
        return fail(EbStatus::InvalidArgument, "angles must be finite");
    }
    guard(|| {
        let p = prepare_state(angles, calibration_phase)?;
        *out = Box::into_raw(Box::new(EbPrepared(p)));
        Ok(EbStatus::Ok)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `p` must be null or a handle from `eb_prepared_new*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eb_prepared_free(p: *mut EbPrepared) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Fidelity of the prepared state with the target state.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_prepared_fidelity(p: *const EbPrepared, out: *mut f64) -> EbStatus {
    non_null!(p, out);
    guard(|| {
        *out = (*p).0.fidelity_to_target();
        Ok(EbStatus::Ok)
    })
}

/// Probability that the preparation heralds successfully.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_prepared_probability(p: *const EbPrepared, out: *mut f64) -> EbStatus {
    non_null!(p, out);
    *out = (*p).0.preparation_probability;
    EbStatus::Ok
}

/// Outcome probabilities `[++, +-, -+, --]` for Alice's angle `theta1` and
/// Bob's mixing angle `theta2`.
///
/// # Safety
/// `p` must be a live handle; `out` must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn eb_outcome_probabilities(
    p: *const EbPrepared,
    theta1: f64,
    theta2: f64,
    out: *mut f64,
) -> EbStatus {
    non_null!(p, out);
    guard(|| {
        let probs = outcome_probabilities(&(*p).0, theta1, theta2);
        std::ptr::write(out as *mut [f64; 4], probs);
        Ok(EbStatus::Ok)
    })
}

/// Exact correlation `E(theta1, theta2)`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_correlation_exact(
    p: *const EbPrepared,
    theta1: f64,
    theta2: f64,
    out: *mut f64,
) -> EbStatus {
    non_null!(p, out);
    guard(|| {
        *out = correlation_exact(&(*p).0, theta1, theta2);
        Ok(EbStatus::Ok)
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EbNoiseKind {
    /// One visibility for every setting (`visibility_hv`).
    Uniform = 0,
    /// `visibility_hv` when `theta2` is a multiple of pi/2, else `visibility_pm`.
    PerBasis = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbNoise {
    /// An `EbNoiseKind` value.
    pub kind: i32,
    pub visibility_hv: f64,
    pub visibility_pm: f64,
}

impl EbNoise {
    fn model(&self) -> Option<NoiseModel> {
        match self.kind {
            k if k == EbNoiseKind::Uniform as i32 => Some(NoiseModel::uniform(self.visibility_hv)),
            k if k == EbNoiseKind::PerBasis as i32 => {
                Some(NoiseModel::per_basis(self.visibility_hv, self.visibility_pm))
            }
            _ => None,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EbCounts {
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EbEstimate {
    pub e_value: f64,
    pub sigma: f64,
}

impl From<CorrelationEstimate> for EbEstimate {
    fn from(e: CorrelationEstimate) -> Self {
        EbEstimate {
            e_value: e.e_value,
            sigma: e.sigma,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EbChshResult {
    pub e: [EbEstimate; 4],
    pub s_value: f64,
    pub s_sigma: f64,
    pub sigmas_of_violation: f64,
    pub violates_local_bound: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EbFringeFit {
    pub mean: f64,
    pub visibility: f64,
    pub phase: f64,
}

/// Poisson counts with mean `mean_total * p` per outcome. The same seed and
/// inputs always give the same counts.
///
/// # Safety
/// `p` must be a live handle; `noise` readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eb_simulate_counts(
    p: *const EbPrepared,
    theta1: f64,
    theta2: f64,
    noise: *const EbNoise,
    mean_total: f64,
    seed: u64,
    out: *mut EbCounts,
) -> EbStatus {
    non_null!(p, noise, out);
    if !(mean_total >= 0.0 && mean_total.is_finite()) {
        return fail(EbStatus::InvalidArgument, "mean_total must be finite and non-negative");
    }
    let Some(model) = (*noise).model() else {
        return fail(EbStatus::InvalidArgument, "unknown noise kind");
    };
    guard(|| {
        let c = simulate_counts(&(*p).0, (theta1, theta2), &model, mean_total, seed)?;
        *out = EbCounts {
            n_pp: c.n_pp,
            n_pm: c.n_pm,
            n_mp: c.n_mp,
            n_mm: c.n_mm,
        };
        Ok(EbStatus::Ok)
    })
}

/// Correlation estimate and its propagated Poisson error.
///
/// # Safety
/// `counts` readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eb_correlation_from_counts(counts: *const EbCounts, out: *mut EbEstimate) -> EbStatus {
    non_null!(counts, out);
    let c = &*counts;
    guard(|| {
        *out = correlation_from_counts(&SettingCounts::new(c.n_pp, c.n_pm, c.n_mp, c.n_mm))?.into();
        Ok(EbStatus::Ok)
    })
}

/// CHSH parameter `|-E1 + E2 + E3 + E4|` with its error.
///
/// # Safety
/// `estimates` must point to 4 readable estimates; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eb_chsh(estimates: *const EbEstimate, out: *mut EbChshResult) -> EbStatus {
    non_null!(estimates, out);
    let e = std::ptr::read(estimates as *const [EbEstimate; 4]).map(|e| CorrelationEstimate::new(e.e_value, e.sigma));
    guard(|| {
        let r = chsh(e[0], e[1], e[2], e[3]);
        *out = EbChshResult {
            e: r.e.map(EbEstimate::from),
            s_value: r.s_value,
            s_sigma: r.s_sigma,
            sigmas_of_violation: r.sigmas_of_violation,
            violates_local_bound: r.violates_local_bound(),
        };
        Ok(EbStatus::Ok)
    })
}

/// Least-squares fringe fit of `counts[i]` against `angles[i]` (radians).
///
/// # Safety
/// `angles` and `counts` must each point to `n` readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eb_fit_visibility(
    angles: *const f64,
    counts: *const f64,
    n: usize,
    out: *mut EbFringeFit,
) -> EbStatus {
    non_null!(angles, counts, out);
    let a = std::slice::from_raw_parts(angles, n);
    let c = std::slice::from_raw_parts(counts, n);
    let scan: Vec<(f64, f64)> = a.iter().copied().zip(c.iter().copied()).collect();
    guard(|| {
        let f = fit_visibility(&scan)?;
        *out = EbFringeFit {
            mean: f.mean,
            visibility: f.visibility,
            phase: f.phase,
        };
        Ok(EbStatus::Ok)
    })
}

/// Largest CHSH value reachable by local deterministic strategies (2).
#[no_mangle]
pub extern "C" fn eb_lhv_max_chsh() -> f64 {
    lhv_max_chsh()
}

/// White-noise visibility below which the optimal CHSH value stops exceeding 2.
///
/// # Safety
/// `p` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eb_critical_visibility(p: *const EbPrepared, out: *mut f64) -> EbStatus {
    non_null!(p, out);
    guard(|| {
        *out = critical_visibility(&(*p).0)?;
        Ok(EbStatus::Ok)
    })
}
