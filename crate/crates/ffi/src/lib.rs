//! C ABI over the certifier.
//!
//! States and measurements are opaque handles created by `eu_*_new`-style
//! constructors and released with the matching `_free`. Every fallible call
//! returns an [`EuStatus`]; on failure, `eu_last_error_message` describes the
//! most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use entropic_uncertainty::certifier::{self, InequalityReport};
use entropic_uncertainty::harness;
use entropic_uncertainty::matrix::{ComplexMatrix, C64};
use entropic_uncertainty::measurements::{self, Measurement};
use entropic_uncertainty::states::{self, DensityState};
use entropic_uncertainty::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EuStatus {
    Ok = 0,
    NullPointer = 1,
    Precondition = 2,
    Dimension = 3,
    Domain = 4,
    Parse = 5,
    Validation = 6,
    Usage = 7,
    InvalidUtf8 = 8,
    Panic = 9,
}

/// Opaque density matrix handle.
pub struct EuState {
    inner: DensityState,
}

/// Opaque measurement handle.
pub struct EuMeasurement {
    inner: Measurement,
}

/// Headline numbers of an inequality report.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EuSummary {
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Number of chain links; zero for plain theorem checks.
    pub link_count: usize,
    pub failed_links: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EuStatus {
    match e {
        Error::Precondition(_) => EuStatus::Precondition,
        Error::Dimension(_) => EuStatus::Dimension,
        Error::Domain(_) => EuStatus::Domain,
        Error::Parse { .. } => EuStatus::Parse,
        Error::Validation { .. } => EuStatus::Validation,
        Error::Usage(_) => EuStatus::Usage,
    }
}

enum Failure {
    Core(Error),
    Null(&'static str),
    Utf8(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EuStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EuStatus::Ok,
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            EuStatus::NullPointer
        }
        Ok(Err(Failure::Utf8(what))) => {
            set_error(format!("{what} is not valid UTF-8"));
            EuStatus::InvalidUtf8
        }
        Err(_) => {
            set_error("internal panic".into());
            EuStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

/// Row-major complex matrix from separate real and imaginary arrays.
unsafe fn complex_matrix(re: *const f64, im: *const f64, n: usize) -> Result<ComplexMatrix, Failure> {
    let re = slice(re, n * n, "re")?;
    let im = if im.is_null() { None } else { Some(slice(im, n * n, "im")?) };
    let data = (0..n * n)
        .map(|i| C64::new(re[i], im.map_or(0.0, |v| v[i])))
        .collect();
    Ok(ComplexMatrix::new(n, n, data)?)
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn eu_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn eu_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn boxed_state(out: *mut *mut EuState, s: DensityState) -> Result<(), Failure> {
    unsafe { write(out, Box::into_raw(Box::new(EuState { inner: s })), "out") }
}

fn boxed_measurement(out: *mut *mut EuMeasurement, m: Measurement) -> Result<(), Failure> {
    unsafe { write(out, Box::into_raw(Box::new(EuMeasurement { inner: m })), "out") }
}

/// Random density matrix `GG†/tr GG†` with a `dim × rank` Ginibre `G`.
///
/// # Safety
/// `dims` points to `n_dims` values; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_state_random(
    dims: *const usize,
    n_dims: usize,
    rank: usize,
    seed: u64,
    out: *mut *mut EuState,
) -> EuStatus {
    guard(|| {
        let dims = slice(dims, n_dims, "dims")?;
        boxed_state(out, states::random_density(dims, rank, seed)?)
    })
}

/// Maximally entangled state on `d ⊗ d`.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_state_maximally_entangled(d: usize, out: *mut *mut EuState) -> EuStatus {
    guard(|| boxed_state(out, states::maximally_entangled(d)?))
}

/// State from a row-major matrix of side `Π dims`. `im` may be null.
///
/// # Safety
/// `re` (and `im` unless null) hold `(Π dims)²` values; `dims` holds
/// `n_dims` values; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_state_from_matrix(
    re: *const f64,
    im: *const f64,
    dims: *const usize,
    n_dims: usize,
    out: *mut *mut EuState,
) -> EuStatus {
    guard(|| {
        let dims = slice(dims, n_dims, "dims")?.to_vec();
        let n = dims.iter().product();
        let m = complex_matrix(re, im, n)?;
        boxed_state(out, DensityState::new(m, dims)?)
    })
}

/// Purification on `dims + [rank]` of a state with at most two factors.
///
/// # Safety
/// `state` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_state_purify(state: *const EuState, out: *mut *mut EuState) -> EuStatus {
    guard(|| boxed_state(out, deref(state, "state")?.inner.purify()?))
}

/// Total dimension of the state, or 0 for a null handle.
///
/// # Safety
/// `state` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eu_state_dim(state: *const EuState) -> usize {
    state.as_ref().map_or(0, |s| s.inner.dim())
}

/// # Safety
/// `state` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eu_state_free(state: *mut EuState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Computational-basis measurement.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_measurement_standard(d: usize, out: *mut *mut EuMeasurement) -> EuStatus {
    guard(|| boxed_measurement(out, measurements::standard_measurement(d)?))
}

/// Fourier-basis measurement.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_measurement_dft(d: usize, out: *mut *mut EuMeasurement) -> EuStatus {
    guard(|| boxed_measurement(out, measurements::dft_measurement(d)?))
}

/// Random `n`-outcome Kraus measurement.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_measurement_random(
    d: usize,
    n: usize,
    seed: u64,
    out: *mut *mut EuMeasurement,
) -> EuStatus {
    guard(|| boxed_measurement(out, measurements::random_measurement(d, n, seed)?))
}

/// Measurement in a Haar-random orthonormal basis.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_measurement_haar_basis(d: usize, seed: u64, out: *mut *mut EuMeasurement) -> EuStatus {
    guard(|| boxed_measurement(out, measurements::haar_basis_measurement(d, seed)?))
}

/// Measurement from `n` row-major `d × d` operators stored back to back.
/// `im` may be null.
///
/// # Safety
/// `re` (and `im` unless null) hold `n·d²` values; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_measurement_from_operators(
    re: *const f64,
    im: *const f64,
    d: usize,
    n: usize,
    out: *mut *mut EuMeasurement,
) -> EuStatus {
    guard(|| {
        let block = d * d;
        let re = slice(re, n * block, "re")?;
        let im = if im.is_null() { None } else { Some(slice(im, n * block, "im")?) };
        let ops = (0..n)
            .map(|k| {
                let r = &re[k * block..(k + 1) * block];
                let i = im.map(|v| &v[k * block..(k + 1) * block]);
                complex_matrix(r.as_ptr(), i.map_or(ptr::null(), |v| v.as_ptr()), d)
            })
            .collect::<Result<Vec<_>, _>>()?;
        boxed_measurement(out, Measurement::new(ops)?)
    })
}

/// # Safety
/// `m` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eu_measurement_free(m: *mut EuMeasurement) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// `c₁ = max_{j,k} √tr(A_j†A_j B_k†B_k)`.
///
/// # Safety
/// `a`, `b` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_c1(a: *const EuMeasurement, b: *const EuMeasurement, out: *mut f64) -> EuStatus {
    guard(|| {
        let c = measurements::c1_constant(&deref(a, "a")?.inner, &deref(b, "b")?.inner)?;
        write(out, c, "out")
    })
}

/// `c_∞ = max_{j,k} √‖B_k A_j†A_j B_k†‖`.
///
/// # Safety
/// `a`, `b` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_c_infinity(a: *const EuMeasurement, b: *const EuMeasurement, out: *mut f64) -> EuStatus {
    guard(|| {
        let c = measurements::c_infinity_constant(&deref(a, "a")?.inner, &deref(b, "b")?.inner)?;
        write(out, c, "out")
    })
}

fn summary(r: &InequalityReport) -> EuSummary {
    EuSummary {
        slack: r.slack,
        tolerance: r.tolerance,
        pass: r.pass,
        link_count: r.links.len(),
        failed_links: r.links.iter().filter(|l| !l.pass).count(),
    }
}

type Certifier = fn(&DensityState, &Measurement, &Measurement) -> entropic_uncertainty::Result<InequalityReport>;

unsafe fn certify(
    f: Certifier,
    state: *const EuState,
    a: *const EuMeasurement,
    b: *const EuMeasurement,
    out: *mut EuSummary,
) -> EuStatus {
    guard(|| {
        let r = f(&deref(state, "state")?.inner, &deref(a, "a")?.inner, &deref(b, "b")?.inner)?;
        write(out, summary(&r), "out")
    })
}

/// Two-space relation on a bipartite state; measurements act on factor 1.
///
/// # Safety
/// Handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_two_space(
    state: *const EuState,
    a: *const EuMeasurement,
    b: *const EuMeasurement,
    out: *mut EuSummary,
) -> EuStatus {
    certify(certifier::two_space, state, a, b, out)
}

/// Two-and-a-half-space relation on a bipartite state.
///
/// # Safety
/// Handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_two_half_space(
    state: *const EuState,
    a: *const EuMeasurement,
    b: *const EuMeasurement,
    out: *mut EuSummary,
) -> EuStatus {
    certify(certifier::two_half_space, state, a, b, out)
}

/// Three-space relation on a tripartite state.
///
/// # Safety
/// Handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_three_space(
    state: *const EuState,
    a: *const EuMeasurement,
    b: *const EuMeasurement,
    out: *mut EuSummary,
) -> EuStatus {
    certify(certifier::three_space, state, a, b, out)
}

fn delta_arg(delta: f64) -> Option<f64> {
    (delta > 0.0).then_some(delta)
}

/// Proof replay of the two-space relation. `delta ≤ 0` means no
/// regularization.
///
/// # Safety
/// Handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_proof_replay_two_space(
    state: *const EuState,
    a: *const EuMeasurement,
    b: *const EuMeasurement,
    delta: f64,
    out: *mut EuSummary,
) -> EuStatus {
    guard(|| {
        let r = certifier::proof_replay_two_space(
            &deref(state, "state")?.inner,
            &deref(a, "a")?.inner,
            &deref(b, "b")?.inner,
            delta_arg(delta),
        )?;
        write(out, summary(&r), "out")
    })
}

/// Proof replay of the two-and-a-half-space relation.
///
/// # Safety
/// Handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_proof_replay_two_half_space(
    state: *const EuState,
    a: *const EuMeasurement,
    b: *const EuMeasurement,
    delta: f64,
    out: *mut EuSummary,
) -> EuStatus {
    guard(|| {
        let r = certifier::proof_replay_two_half_space(
            &deref(state, "state")?.inner,
            &deref(a, "a")?.inner,
            &deref(b, "b")?.inner,
            delta_arg(delta),
        )?;
        write(out, summary(&r), "out")
    })
}

/// Runs a JSON scenario and renders the report as `human`, `json` or `csv`.
/// The rendered text is returned through `out` and must be released with
/// [`eu_string_free`]. `all_pass` may be null.
///
/// # Safety
/// `scenario` and `format` are NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn eu_run_scenario(
    scenario: *const c_char,
    format: *const c_char,
    out: *mut *mut c_char,
    all_pass: *mut bool,
) -> EuStatus {
    guard(|| {
        let spec = harness::parse_scenario(text(scenario, "scenario")?)?;
        let format = text(format, "format")?;
        let report = harness::run_scenario(&spec)?;
        let rendered = harness::emit_report(&report, format)?;
        if !all_pass.is_null() {
            all_pass.write(report.all_pass());
        }
        let c = CString::new(rendered).expect("reports contain no NUL");
        write(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` is null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eu_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
