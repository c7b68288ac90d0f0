//! C ABI over the corrkit library.
//!
//! Conventions:
//!
//! * Objects live behind opaque handles (`CorrkitMatrix`,
//!   `CorrkitDefiniteness`, `CorrkitMembership`), created and destroyed by
//!   paired `_new`/`_free` calls. Handles are not thread-safe to mutate but
//!   may be read from any thread.
//! * Every fallible call returns a `CorrkitStatus`; `corrkit_last_error`
//!   gives a human-readable message for the most recent failure on the
//!   calling thread. Strings returned by `_to_json` are owned by the caller
//!   and must be released with `corrkit_string_free`.
//! * Matrices are row-major `n*n` double buffers. Sign/lattice points are
//!   `int32_t` buffers.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use corrkit::definiteness::{
    cpd_anti_stable, cpd_exact, cpd_refute, lattice_positive_exact, DefinitenessVerdict, Verdict,
};
use corrkit::membership::{
    lattice_membership_test_with, mcmillan_test_with, AcfSequence, MembershipOptions,
    MembershipVerdict,
};
use corrkit::pointproc::{
    acf_estimate, telegraph_simulate, transient_distribution, uniformize, DenominatorMode,
    GeneratorMatrix,
};
use corrkit::quadform::SymmetricMatrix;
use corrkit::search::{HYPERCUBE_ENUM_CAP, LATTICE_ENUM_CAP};
use corrkit::Error;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CorrkitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    CapacityExceeded = 4,
    NoConvergence = 5,
    InternalError = 6,
}

/// Verdict of a definiteness check.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CorrkitVerdict {
    Positive = 0,
    NotPositive = 1,
    Unknown = 2,
}

/// Opaque symmetric matrix handle.
pub struct CorrkitMatrix(SymmetricMatrix);

/// Opaque definiteness-verdict handle.
pub struct CorrkitDefiniteness(DefinitenessVerdict);

/// Opaque membership-verdict handle.
pub struct CorrkitMembership(MembershipVerdict);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|c| *c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> CorrkitStatus {
    match err {
        Error::Dimension(_) => CorrkitStatus::DimensionMismatch,
        Error::Validation(_) => CorrkitStatus::InvalidArgument,
        Error::Capacity(_) => CorrkitStatus::CapacityExceeded,
        Error::NonConvergence { .. } => CorrkitStatus::NoConvergence,
        Error::Internal(_) | Error::Io(_) | Error::Json(_) => CorrkitStatus::InternalError,
    }
}

fn fail(err: &Error) -> CorrkitStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Runs a body that may panic; panics become `InternalError`.
fn guarded<F: FnOnce() -> CorrkitStatus>(f: F) -> CorrkitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("panic inside corrkit");
            CorrkitStatus::InternalError
        }
    }
}

/// Message for the most recent failure on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn corrkit_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Crate version as a static string.
#[no_mangle]
pub extern "C" fn corrkit_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Frees a string returned by a `_to_json` call.
#[no_mangle]
pub unsafe extern "C" fn corrkit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn export_json<T: serde::Serialize>(value: &T, out: *mut *mut c_char) -> CorrkitStatus {
    if out.is_null() {
        set_error("null output pointer");
        return CorrkitStatus::NullPointer;
    }
    match serde_json::to_string_pretty(value) {
        Ok(json) => match CString::new(json) {
            Ok(cstr) => {
                unsafe { *out = cstr.into_raw() };
                CorrkitStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                CorrkitStatus::InternalError
            }
        },
        Err(e) => {
            set_error(&e.to_string());
            CorrkitStatus::InternalError
        }
    }
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// Builds an n×n symmetric matrix from a row-major buffer. Asymmetric input
/// is replaced by its symmetric part (the quadratic form is unchanged).
///
/// # Safety
/// `data` must point to `n*n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrkit_matrix_new(
    n: usize,
    data: *const f64,
    out: *mut *mut CorrkitMatrix,
) -> CorrkitStatus {
    if data.is_null() || out.is_null() {
        set_error("null pointer argument");
        return CorrkitStatus::NullPointer;
    }
    if n == 0 {
        set_error("matrix order must be ≥ 1");
        return CorrkitStatus::InvalidArgument;
    }
    guarded(|| {
        let buf = std::slice::from_raw_parts(data, n * n);
        let rows: Vec<Vec<f64>> = (0..n).map(|i| buf[i * n..(i + 1) * n].to_vec()).collect();
        match corrkit::quadform::SquareMatrix::from_rows(&rows) {
            Ok(square) => {
                let m = SymmetricMatrix::symmetric_part(&square);
                *out = Box::into_raw(Box::new(CorrkitMatrix(m)));
                CorrkitStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `m` must be a pointer from `corrkit_matrix_new` (or null).
#[no_mangle]
pub unsafe extern "C" fn corrkit_matrix_free(m: *mut CorrkitMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Matrix order, or 0 for null.
///
/// # Safety
/// `m` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn corrkit_matrix_order(m: *const CorrkitMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.n())
}

// ---------------------------------------------------------------------------
// Definiteness
// ---------------------------------------------------------------------------

unsafe fn run_definiteness(
    m: *const CorrkitMatrix,
    out: *mut *mut CorrkitDefiniteness,
    f: impl FnOnce(&SymmetricMatrix) -> corrkit::Result<DefinitenessVerdict>,
) -> CorrkitStatus {
    let Some(matrix) = m.as_ref() else {
        set_error("null matrix handle");
        return CorrkitStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null output pointer");
        return CorrkitStatus::NullPointer;
    }
    match f(&matrix.0) {
        Ok(v) => {
            *out = Box::into_raw(Box::new(CorrkitDefiniteness(v)));
            CorrkitStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Exact corner-positivity verdict by hypercube enumeration.
///
/// # Safety
/// `m` must be a valid matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrkit_cpd_exact(
    m: *const CorrkitMatrix,
    out: *mut *mut CorrkitDefiniteness,
) -> CorrkitStatus {
    guarded(|| run_definiteness(m, out, |c| cpd_exact(c, HYPERCUBE_ENUM_CAP)))
}

/// Corner-positivity via the anti-stable-state criterion.
///
/// # Safety
/// `m` must be a valid matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrkit_cpd_anti_stable(
    m: *const CorrkitMatrix,
    out: *mut *mut CorrkitDefiniteness,
) -> CorrkitStatus {
    guarded(|| run_definiteness(m, out, |c| cpd_anti_stable(c, HYPERCUBE_ENUM_CAP)))
}

/// Heuristic refutation by seeded multi-start descent; never "positive".
///
/// # Safety
/// `m` must be a valid matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrkit_cpd_refute(
    m: *const CorrkitMatrix,
    starts: usize,
    seed: u64,
    out: *mut *mut CorrkitDefiniteness,
) -> CorrkitStatus {
    guarded(|| run_definiteness(m, out, |c| cpd_refute(c, starts, seed)))
}

/// Exact positivity over the bounded symmetric lattice {±1,…,±M}^n.
///
/// # Safety
/// `m` must be a valid matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrkit_lattice_positive_exact(
    m: *const CorrkitMatrix,
    m_bound: u32,
    out: *mut *mut CorrkitDefiniteness,
) -> CorrkitStatus {
    guarded(|| run_definiteness(m, out, |c| lattice_positive_exact(c, m_bound, LATTICE_ENUM_CAP)))
}

/// # Safety
/// `d` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn corrkit_definiteness_free(d: *mut CorrkitDefiniteness) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Verdict of the check; `Unknown` for a null handle.
///
/// # Safety
/// `d` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn corrkit_definiteness_verdict(
    d: *const CorrkitDefiniteness,
) -> CorrkitVerdict {
    match d.as_ref().map(|d| d.0.verdict) {
        Some(Verdict::Positive) => CorrkitVerdict::Positive,
        Some(Verdict::NotPositive) => CorrkitVerdict::NotPositive,
        _ => CorrkitVerdict::Unknown,
    }
}

/// Exact minimum of the form over the set, when the method was exact.
///
/// # Safety
/// `d` must be a valid handle; `margin` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrkit_definiteness_margin(
    d: *const CorrkitDefiniteness,
    margin: *mut f64,
) -> CorrkitStatus {
    let Some(handle) = d.as_ref() else {
        set_error("null verdict handle");
        return CorrkitStatus::NullPointer;
    };
    if margin.is_null() {
        set_error("null output pointer");
        return CorrkitStatus::NullPointer;
    }
    match handle.0.margin {
        Some(v) => {
            *margin = v;
            CorrkitStatus::Ok
        }
        None => {
            set_error("verdict carries no margin (heuristic method)");
            CorrkitStatus::InvalidArgument
        }
    }
}

/// Length of the violating witness, or 0 when there is none.
///
/// # Safety
/// `d` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn corrkit_definiteness_witness_len(d: *const CorrkitDefiniteness) -> usize {
    d.as_ref()
        .and_then(|d| d.0.witness.as_ref())
        .map_or(0, |w| w.components().len())
}

/// Copies the witness into `buf` (capacity `cap` int32 values).
///
/// # Safety
/// `d` must be a valid handle; `buf` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn corrkit_definiteness_witness(
    d: *const CorrkitDefiniteness,
    buf: *mut i32,
    cap: usize,
) -> CorrkitStatus {
    let Some(handle) = d.as_ref() else {
        set_error("null verdict handle");
        return CorrkitStatus::NullPointer;
    };
    let Some(witness) = handle.0.witness.as_ref() else {
        set_error("verdict carries no witness");
        return CorrkitStatus::InvalidArgument;
    };
    let comps = witness.components();
    if buf.is_null() || cap < comps.len() {
        set_error("witness buffer too small");
        return CorrkitStatus::DimensionMismatch;
    }
    for (i, v) in comps.iter().enumerate() {
        *buf.add(i) = *v;
    }
    CorrkitStatus::Ok
}

/// Serializes the verdict as JSON; free with `corrkit_string_free`.
///
/// # Safety
/// `d` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrkit_definiteness_to_json(
    d: *const CorrkitDefiniteness,
    out: *mut *mut c_char,
) -> CorrkitStatus {
    let Some(handle) = d.as_ref() else {
        set_error("null verdict handle");
        return CorrkitStatus::NullPointer;
    };
    export_json(&handle.0, out)
}

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

/// Membership of a ±1-class lag sequence (rho[0] must be 1).
///
/// # Safety
/// `rho` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrkit_acf_unit_test(
    rho: *const f64,
    len: usize,
    seed: u64,
    out: *mut *mut CorrkitMembership,
) -> CorrkitStatus {
    if rho.is_null() || out.is_null() {
        set_error("null pointer argument");
        return CorrkitStatus::NullPointer;
    }
    guarded(|| {
        let lags = std::slice::from_raw_parts(rho, len).to_vec();
        let result = AcfSequence::unit(lags).and_then(|acf| {
            mcmillan_test_with(
                &acf,
                &MembershipOptions {
                    seed,
                    ..MembershipOptions::default()
                },
            )
        });
        match result {
            Ok(v) => {
                *out = Box::into_raw(Box::new(CorrkitMembership(v)));
                CorrkitStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Membership of a lattice-class lag sequence
/// (rho[0] must equal (M+1)(2M+1)/6).
///
/// # Safety
/// `rho` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrkit_acf_lattice_test(
    rho: *const f64,
    len: usize,
    m_bound: u32,
    seed: u64,
    out: *mut *mut CorrkitMembership,
) -> CorrkitStatus {
    if rho.is_null() || out.is_null() {
        set_error("null pointer argument");
        return CorrkitStatus::NullPointer;
    }
    guarded(|| {
        let lags = std::slice::from_raw_parts(rho, len).to_vec();
        let result = AcfSequence::lattice(lags, m_bound).and_then(|acf| {
            lattice_membership_test_with(
                &acf,
                &MembershipOptions {
                    seed,
                    ..MembershipOptions::default()
                },
            )
        });
        match result {
            Ok(v) => {
                *out = Box::into_raw(Box::new(CorrkitMembership(v)));
                CorrkitStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `h` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn corrkit_membership_free(h: *mut CorrkitMembership) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// 1 for a member, 0 for a non-member, −1 for a null handle.
///
/// # Safety
/// `h` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn corrkit_membership_is_member(h: *const CorrkitMembership) -> i32 {
    match h.as_ref() {
        Some(h) => h.0.is_member() as i32,
        None => -1,
    }
}

/// Decomposition residual (members) or witness trace value (non-members).
///
/// # Safety
/// `h` must be a valid handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrkit_membership_certificate_value(
    h: *const CorrkitMembership,
    value: *mut f64,
) -> CorrkitStatus {
    let Some(handle) = h.as_ref() else {
        set_error("null membership handle");
        return CorrkitStatus::NullPointer;
    };
    if value.is_null() {
        set_error("null output pointer");
        return CorrkitStatus::NullPointer;
    }
    *value = match &handle.0 {
        MembershipVerdict::Member { residual, .. } => *residual,
        MembershipVerdict::NonMember { trace_value, .. } => *trace_value,
    };
    CorrkitStatus::Ok
}

/// Serializes the verdict (decomposition or witness included) as JSON.
///
/// # Safety
/// `h` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrkit_membership_to_json(
    h: *const CorrkitMembership,
    out: *mut *mut c_char,
) -> CorrkitStatus {
    let Some(handle) = h.as_ref() else {
        set_error("null membership handle");
        return CorrkitStatus::NullPointer;
    };
    export_json(&handle.0, out)
}

// ---------------------------------------------------------------------------
// Simulation and series helpers (flat buffers, no handles)
// ---------------------------------------------------------------------------

/// Simulates the ±1 flip chain into a caller buffer of `len` int32 values.
///
/// # Safety
/// `out` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn corrkit_telegraph_simulate(
    p_flip: f64,
    len: usize,
    seed: u64,
    out: *mut i32,
) -> CorrkitStatus {
    if out.is_null() {
        set_error("null output pointer");
        return CorrkitStatus::NullPointer;
    }
    guarded(|| match telegraph_simulate(p_flip, len, seed) {
        Ok(xs) => {
            for (i, v) in xs.iter().enumerate() {
                *out.add(i) = *v;
            }
            CorrkitStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// Writes rho[0..=max_lag] (per-lag denominators) into `rho_out`.
///
/// # Safety
/// `x` must point to `len` doubles; `rho_out` must hold `max_lag + 1`.
#[no_mangle]
pub unsafe extern "C" fn corrkit_acf_estimate(
    x: *const f64,
    len: usize,
    max_lag: usize,
    rho_out: *mut f64,
) -> CorrkitStatus {
    if x.is_null() || rho_out.is_null() {
        set_error("null pointer argument");
        return CorrkitStatus::NullPointer;
    }
    guarded(|| {
        let series = std::slice::from_raw_parts(x, len);
        match acf_estimate(series, max_lag, DenominatorMode::PerLag) {
            Ok(est) => {
                for (i, v) in est.rho.iter().enumerate() {
                    *rho_out.add(i) = *v;
                }
                CorrkitStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Transient distribution of the jump process with generator `q` (row-major
/// n×n) at time `t`, written into `out` (n doubles).
///
/// # Safety
/// `q` must point to `n*n` doubles; `out` must hold `n`.
#[no_mangle]
pub unsafe extern "C" fn corrkit_transient_distribution(
    q: *const f64,
    n: usize,
    init_state: usize,
    t: f64,
    tol: f64,
    out: *mut f64,
) -> CorrkitStatus {
    if q.is_null() || out.is_null() {
        set_error("null pointer argument");
        return CorrkitStatus::NullPointer;
    }
    guarded(|| {
        let buf = std::slice::from_raw_parts(q, n * n);
        let rows: Vec<Vec<f64>> = (0..n).map(|i| buf[i * n..(i + 1) * n].to_vec()).collect();
        let result = GeneratorMatrix::from_rows(&rows)
            .and_then(|g| transient_distribution(&g, t, init_state, tol, None));
        match result {
            Ok(dist) => {
                for (i, v) in dist.iter().enumerate() {
                    *out.add(i) = *v;
                }
                CorrkitStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Uniformization p = I + q/lambda. Pass `lambda ≤ 0` for the default (max
/// exit rate). Writes the jump matrix into `p_out` (n×n) and the rate used
/// into `lambda_out`.
///
/// # Safety
/// `q` must point to `n*n` doubles; `p_out` must hold `n*n`; `lambda_out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrkit_uniformize(
    q: *const f64,
    n: usize,
    lambda: f64,
    p_out: *mut f64,
    lambda_out: *mut f64,
) -> CorrkitStatus {
    if q.is_null() || p_out.is_null() || lambda_out.is_null() {
        set_error("null pointer argument");
        return CorrkitStatus::NullPointer;
    }
    guarded(|| {
        let buf = std::slice::from_raw_parts(q, n * n);
        let rows: Vec<Vec<f64>> = (0..n).map(|i| buf[i * n..(i + 1) * n].to_vec()).collect();
        let result = GeneratorMatrix::from_rows(&rows).and_then(|g| {
            let lam = if lambda > 0.0 { Some(lambda) } else { None };
            uniformize(&g, lam)
        });
        match result {
            Ok((p, lam)) => {
                for (i, row) in p.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        *p_out.add(i * n + j) = *v;
                    }
                }
                *lambda_out = lam;
                CorrkitStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
