//! C ABI over `flagged-epp`.
//!
//! Conventions:
//!
//! - Every fallible function returns a [`FepStatus`]; results go through out-pointers.
//! - Objects are opaque handles created by `fep_*_new*`/`fep_*_step` and released with
//!   the matching `fep_*_free`. Freeing NULL is a no-op.
//! - On failure a human-readable message is kept per thread and can be read with
//!   [`fep_last_error_message`].
//! - Coefficient buffers use the crate's cell order: index `4 * bell + flag`, with
//!   Bell labels Φ⁺, Ψ⁻, Ψ⁺, Φ⁻ and flags 00, 01, 10, 11.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use flagged_epp::analysis::{
    classify_regime, critical_f0_binary, critical_interval_white_noise, RegimeCriteria, RegimeLabel,
};
use flagged_epp::recurrence::{
    conditional_fidelity, flagged_step, iterate, make_initial_flagged, make_werner, Coefficients, FlaggedState16,
    NoiseModel,
};
use flagged_epp::Error;

/// Number of cells in a flagged state and entries in a noise model.
pub const FEP_CELLS: usize = 16;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FepStatus {
    Ok = 0,
    NullPointer = 1,
    NotNormalized = 2,
    NegativeProbability = 3,
    Domain = 4,
    OracleInconsistent = 5,
    EnsembleAnnihilated = 6,
    EigenSolver = 7,
    NoSignChange = 8,
    Unreachable = 9,
    Config = 10,
    Io = 11,
    Json = 12,
    /// A Rust panic was caught at the boundary; this is a bug.
    Panic = 13,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FepRegime {
    HighNoise = 0,
    Intermediate = 1,
    Security = 2,
}

/// Opaque noise model: joint Pauli-error probabilities of a CNOT.
pub struct FepNoiseModel {
    inner: NoiseModel,
}

/// Opaque 16-cell flagged state.
pub struct FepFlaggedState {
    inner: FlaggedState16,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FepStatus {
    match e {
        Error::NotNormalized { .. } => FepStatus::NotNormalized,
        Error::NegativeProbability { .. } => FepStatus::NegativeProbability,
        Error::Domain { .. } => FepStatus::Domain,
        Error::OracleInconsistent(_) => FepStatus::OracleInconsistent,
        Error::EnsembleAnnihilated => FepStatus::EnsembleAnnihilated,
        Error::EigenSolver(_) => FepStatus::EigenSolver,
        Error::NoSignChange { .. } => FepStatus::NoSignChange,
        Error::Unreachable(_) => FepStatus::Unreachable,
        Error::Config { .. } => FepStatus::Config,
        Error::Io(_) => FepStatus::Io,
        Error::Json(_) => FepStatus::Json,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f` behind a panic guard and translates its outcome into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FepStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FepStatus::Ok,
        Ok(Err(Failure::Null(arg))) => {
            set_last_error(format!("null pointer passed as `{arg}`"));
            FepStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            FepStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, arg: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(arg))
}

unsafe fn out<'a, T>(p: *mut T, arg: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(arg))
}

unsafe fn slice<'a>(p: *const f64, len: usize, arg: &'static str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(arg));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_cells<'a>(p: *mut f64, arg: &'static str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(arg));
    }
    Ok(std::slice::from_raw_parts_mut(p, FEP_CELLS))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failed call on this thread, or NULL if none failed yet.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fep_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn fep_status_name(status: FepStatus) -> *const c_char {
    let s: &'static CStr = match status {
        FepStatus::Ok => c"ok",
        FepStatus::NullPointer => c"null_pointer",
        FepStatus::NotNormalized => c"not_normalized",
        FepStatus::NegativeProbability => c"negative_probability",
        FepStatus::Domain => c"domain",
        FepStatus::OracleInconsistent => c"oracle_inconsistent",
        FepStatus::EnsembleAnnihilated => c"ensemble_annihilated",
        FepStatus::EigenSolver => c"eigen_solver",
        FepStatus::NoSignChange => c"no_sign_change",
        FepStatus::Unreachable => c"unreachable",
        FepStatus::Config => c"config",
        FepStatus::Io => c"io",
        FepStatus::Json => c"json",
        FepStatus::Panic => c"panic",
    };
    s.as_ptr()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---- noise models ----

/// # Safety
/// `out` must be NULL or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn fep_noise_noiseless(out: *mut *mut FepNoiseModel) -> FepStatus {
    guard(|| {
        *self::out(out, "out")? = boxed(FepNoiseModel { inner: NoiseModel::noiseless() });
        Ok(())
    })
}

/// Independent depolarizing noise on each qubit, per-qubit fidelity `f0`.
///
/// # Safety
/// `out` must be NULL or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn fep_noise_one_qubit_white(f0: f64, out: *mut *mut FepNoiseModel) -> FepStatus {
    guard(|| {
        let inner = NoiseModel::one_qubit_white(f0)?;
        *self::out(out, "out")? = boxed(FepNoiseModel { inner });
        Ok(())
    })
}

/// Two-qubit depolarizing noise with no-error probability `f`.
///
/// # Safety
/// `out` must be NULL or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn fep_noise_two_qubit_white(f: f64, out: *mut *mut FepNoiseModel) -> FepStatus {
    guard(|| {
        let inner = NoiseModel::two_qubit_white(f)?;
        *self::out(out, "out")? = boxed(FepNoiseModel { inner });
        Ok(())
    })
}

/// Builds a model from 16 probabilities `f[mu][nu]`, row-major in Pauli order I, X, Y, Z.
///
/// # Safety
/// `entries` must point to `len` readable doubles; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn fep_noise_from_entries(
    entries: *const f64,
    len: usize,
    out: *mut *mut FepNoiseModel,
) -> FepStatus {
    guard(|| {
        let inner = NoiseModel::from_entries(slice(entries, len, "entries")?)?;
        *self::out(out, "out")? = boxed(FepNoiseModel { inner });
        Ok(())
    })
}

/// Noise of `first` followed by `second`.
///
/// # Safety
/// `first` and `second` must be live handles; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn fep_noise_compose(
    first: *const FepNoiseModel,
    second: *const FepNoiseModel,
    out: *mut *mut FepNoiseModel,
) -> FepStatus {
    guard(|| {
        let a = deref(first, "first")?;
        let b = deref(second, "second")?;
        let inner = a.inner.compose(&b.inner);
        *self::out(out, "out")? = boxed(FepNoiseModel { inner });
        Ok(())
    })
}

/// Copies the 16 entries into `buf`.
///
/// # Safety
/// `noise` must be a live handle; `buf` must have room for 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn fep_noise_entries(noise: *const FepNoiseModel, buf: *mut f64) -> FepStatus {
    guard(|| {
        let n = deref(noise, "noise")?;
        out_cells(buf, "buf")?.copy_from_slice(&n.inner.entries());
        Ok(())
    })
}

/// # Safety
/// `noise` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fep_noise_free(noise: *mut FepNoiseModel) {
    if !noise.is_null() {
        drop(Box::from_raw(noise));
    }
}

// ---- states ----

/// Werner state of fidelity `f`, all flags clear.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn fep_state_werner(f: f64, out: *mut *mut FepFlaggedState) -> FepStatus {
    guard(|| {
        let inner = make_initial_flagged(&make_werner(f)?);
        *self::out(out, "out")? = boxed(FepFlaggedState { inner });
        Ok(())
    })
}

/// State from 16 normalized cell weights.
///
/// # Safety
/// `cells` must point to `len` readable doubles; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn fep_state_from_cells(
    cells: *const f64,
    len: usize,
    out: *mut *mut FepFlaggedState,
) -> FepStatus {
    guard(|| {
        let inner = FlaggedState16::try_from_slice(slice(cells, len, "cells")?)?;
        *self::out(out, "out")? = boxed(FepFlaggedState { inner });
        Ok(())
    })
}

/// Copies the 16 cell weights into `buf`.
///
/// # Safety
/// `state` must be a live handle; `buf` must have room for 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn fep_state_cells(state: *const FepFlaggedState, buf: *mut f64) -> FepStatus {
    guard(|| {
        let s = deref(state, "state")?;
        out_cells(buf, "buf")?.copy_from_slice(s.inner.coeffs());
        Ok(())
    })
}

/// Writes the fidelity `F`, the flag-conditional fidelity and `1 - F_cond`.
/// Any of the out-pointers may be NULL.
///
/// # Safety
/// `state` must be a live handle; non-NULL out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn fep_state_fidelities(
    state: *const FepFlaggedState,
    fidelity: *mut f64,
    conditional: *mut f64,
    epsilon: *mut f64,
) -> FepStatus {
    guard(|| {
        let s = &deref(state, "state")?.inner;
        if let Some(p) = fidelity.as_mut() {
            *p = s.fidelity();
        }
        if let Some(p) = conditional.as_mut() {
            *p = conditional_fidelity(s);
        }
        if let Some(p) = epsilon.as_mut() {
            *p = s.epsilon();
        }
        Ok(())
    })
}

/// One purification round. The input handle is left untouched.
///
/// # Safety
/// `state` and `noise` must be live handles; `out` must be writable; `survival` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn fep_state_step(
    state: *const FepFlaggedState,
    noise: *const FepNoiseModel,
    out: *mut *mut FepFlaggedState,
    survival: *mut f64,
) -> FepStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let n = deref(noise, "noise")?;
        let slot = self::out(out, "out")?;
        let (next, p) = flagged_step(&s.inner, &n.inner)?;
        *slot = boxed(FepFlaggedState { inner: next });
        if let Some(sp) = survival.as_mut() {
            *sp = p;
        }
        Ok(())
    })
}

/// Iterates up to `max_rounds` rounds, stopping early once successive states differ
/// by less than `tol`. Writes the final state and the number of rounds performed.
///
/// # Safety
/// `state` and `noise` must be live handles; `out` must be writable; `rounds` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn fep_state_iterate(
    state: *const FepFlaggedState,
    noise: *const FepNoiseModel,
    max_rounds: usize,
    tol: f64,
    out: *mut *mut FepFlaggedState,
    rounds: *mut usize,
) -> FepStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let n = deref(noise, "noise")?;
        let slot = self::out(out, "out")?;
        let t = iterate(&s.inner, &n.inner, max_rounds, tol)?;
        *slot = boxed(FepFlaggedState { inner: t.final_state().clone() });
        if let Some(r) = rounds.as_mut() {
            *r = t.last().round;
        }
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fep_state_free(state: *mut FepFlaggedState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

// ---- analysis ----

/// Critical per-qubit fidelity of the binary flagged map under uncorrelated noise,
/// bisected on `[lo, hi]` to tolerance `tol`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fep_critical_f0_binary(lo: f64, hi: f64, tol: f64, out: *mut f64) -> FepStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = critical_f0_binary((lo, hi), tol)?;
        Ok(())
    })
}

/// Bounds of the intermediate regime under one-qubit white noise.
///
/// # Safety
/// `lower` and `upper` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fep_critical_interval_white(tol: f64, lower: *mut f64, upper: *mut f64) -> FepStatus {
    guard(|| {
        let lo = self::out(lower, "lower")?;
        let hi = self::out(upper, "upper")?;
        let iv = critical_interval_white_noise(tol)?;
        *lo = iv.lower;
        *hi = iv.upper;
        Ok(())
    })
}

/// Classifies the long-run behaviour of `state` under `noise` with default criteria.
/// `state` may be NULL to use the default starting state. `confident` may be NULL.
///
/// # Safety
/// Non-NULL handles must be live; `label` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fep_classify_regime(
    noise: *const FepNoiseModel,
    state: *const FepFlaggedState,
    label: *mut FepRegime,
    confident: *mut bool,
) -> FepStatus {
    guard(|| {
        let n = deref(noise, "noise")?;
        let slot = self::out(label, "label")?;
        let initial = match state.as_ref() {
            Some(s) => s.inner.clone(),
            None => flagged_epp::analysis::default_regime_initial(),
        };
        let c = classify_regime(&n.inner, &initial, &RegimeCriteria::default())?;
        *slot = match c.label {
            RegimeLabel::HighNoise => FepRegime::HighNoise,
            RegimeLabel::Intermediate => FepRegime::Intermediate,
            RegimeLabel::Security => FepRegime::Security,
        };
        if let Some(p) = confident.as_mut() {
            *p = c.confident;
        }
        Ok(())
    })
}
