//! C ABI over `framekit`.
//!
//! Every fallible entry point returns an [`FkStatus`]; on failure a
//! description is available from [`fk_last_error_message`] on the same
//! thread. Systems are opaque [`FkSystem`] handles released with
//! [`fk_system_free`]; strings returned by the library are released with
//! [`fk_string_free`]. Matrices cross the boundary column-major, split into
//! real and imaginary arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use framekit::extraction::{extract_biorthogonal, extract_frame};
use framekit::frame::{frame_report, power_transform};
use framekit::gallery::{generate, GallerySpec};
use framekit::linalg::{c64, CMatrix};
use framekit::metrics::{basis_metrics, riesz_constant};
use framekit::selection::{select_exhaustive, select_greedy};
use framekit::{io, Error, VectorSystem};

/// Opaque handle to a finite vector system.
pub struct FkSystem {
    inner: VectorSystem,
}

/// Result code of every fallible call. Values are stable.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Panic = 3,
    InvalidSystem = 10,
    DimensionMismatch = 11,
    NotSpanning = 12,
    ZeroNorm = 13,
    TooFewVectors = 14,
    CountMismatch = 15,
    TooLarge = 16,
    BadTarget = 17,
    BadParameter = 18,
    NotSeparated = 19,
    GuaranteeEmpty = 20,
    InfeasibleDelta = 21,
    RoundLimit = 22,
    CoverageShortfall = 23,
    QuadratureFailure = 24,
    NotFlat = 25,
    EmptyInput = 26,
    SchemaError = 27,
    Numerical = 28,
}

impl From<&Error> for FkStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidSystem(_) => FkStatus::InvalidSystem,
            Error::DimensionMismatch { .. } => FkStatus::DimensionMismatch,
            Error::NotSpanning { .. } => FkStatus::NotSpanning,
            Error::ZeroNorm => FkStatus::ZeroNorm,
            Error::TooFewVectors(_) => FkStatus::TooFewVectors,
            Error::CountMismatch { .. } => FkStatus::CountMismatch,
            Error::TooLarge { .. } => FkStatus::TooLarge,
            Error::BadTarget { .. } => FkStatus::BadTarget,
            Error::BadParameter(_) => FkStatus::BadParameter,
            Error::NotSeparated { .. } => FkStatus::NotSeparated,
            Error::GuaranteeEmpty => FkStatus::GuaranteeEmpty,
            Error::InfeasibleDelta { .. } => FkStatus::InfeasibleDelta,
            Error::RoundLimit(_) => FkStatus::RoundLimit,
            Error::CoverageShortfall { .. } => FkStatus::CoverageShortfall,
            Error::QuadratureFailure { .. } => FkStatus::QuadratureFailure,
            Error::NotFlat { .. } => FkStatus::NotFlat,
            Error::EmptyInput => FkStatus::EmptyInput,
            Error::Schema { .. } => FkStatus::SchemaError,
            Error::Numerical(_) => FkStatus::Numerical,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FkSelectionMethod {
    Exhaustive = 0,
    Greedy = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FkExtractionMode {
    Biorthogonal = 0,
    Frame = 1,
}

/// Optimal frame bounds and norm range.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FkFrameReport {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub min_norm: f64,
    pub max_norm: f64,
    pub is_tight: bool,
    pub is_spanning: bool,
}

/// Basis constants; unbounded constants are `INFINITY`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FkBasisMetrics {
    pub riesz: f64,
    pub hilbertian: f64,
    pub besselian: f64,
    pub schauder: f64,
    pub separation: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: FkStatus,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            status: FkStatus::from(&e),
            message: e.to_string(),
        }
    }
}

impl Failure {
    fn null(name: &str) -> Self {
        Failure {
            status: FkStatus::NullPointer,
            message: format!("`{name}` is null"),
        }
    }
}

fn set_last_error(message: Option<String>) {
    let message = message.map(|m| CString::new(m.replace('\0', " ")).expect("no interior nul"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> FkStatus {
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|payload| {
        let message = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        Err(Failure {
            status: FkStatus::Panic,
            message,
        })
    });
    match outcome {
        Ok(()) => {
            set_last_error(None);
            FkStatus::Ok
        }
        Err(f) => {
            set_last_error(Some(f.message));
            f.status
        }
    }
}

unsafe fn system_ref<'a>(system: *const FkSystem) -> Result<&'a VectorSystem, Failure> {
    system
        .as_ref()
        .map(|s| &s.inner)
        .ok_or_else(|| Failure::null("system"))
}

unsafe fn read_str<'a>(text: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if text.is_null() {
        return Err(Failure::null(name));
    }
    CStr::from_ptr(text).to_str().map_err(|e| Failure {
        status: FkStatus::InvalidUtf8,
        message: format!("`{name}` is not UTF-8: {e}"),
    })
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_handle(out: *mut *mut FkSystem, inner: VectorSystem) -> Result<(), Failure> {
    write_out(out, Box::into_raw(Box::new(FkSystem { inner })), "out")
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    let text = CString::new(text).map_err(|e| Failure {
        status: FkStatus::SchemaError,
        message: e.to_string(),
    })?;
    write_out(out, text.into_raw(), "out")
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn fk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn fk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a system from `dim * count` column-major entries. `im` may be null
/// for a real system.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `dim * count` readable doubles;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_system_new(
    dim: usize,
    count: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut FkSystem,
) -> FkStatus {
    guard(|| {
        if re.is_null() {
            return Err(Failure::null("re"));
        }
        let len = dim.checked_mul(count).ok_or_else(|| {
            Failure::from(Error::InvalidSystem(format!("{dim} x {count} overflows")))
        })?;
        let re = std::slice::from_raw_parts(re, len);
        let im = (!im.is_null()).then(|| std::slice::from_raw_parts(im, len));
        let matrix = CMatrix::from_fn(dim, count, |i, j| {
            let k = j * dim + i;
            c64(re[k], im.map_or(0.0, |im| im[k]))
        });
        write_handle(out, VectorSystem::new(matrix)?)
    })
}

/// Parses the JSON system document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_system_from_json(
    json: *const c_char,
    out: *mut *mut FkSystem,
) -> FkStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        write_handle(out, io::system_from_json(text)?)
    })
}

/// Serializes a system; release the string with [`fk_string_free`].
///
/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_system_to_json(
    system: *const FkSystem,
    out: *mut *mut c_char,
) -> FkStatus {
    guard(|| {
        let text = io::system_to_json(system_ref(system)?)?;
        write_string(out, text)
    })
}

/// Generates a gallery system from its JSON description.
///
/// # Safety
/// `spec_json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_system_generate(
    spec_json: *const c_char,
    out: *mut *mut FkSystem,
) -> FkStatus {
    guard(|| {
        let spec: GallerySpec = io::from_json(read_str(spec_json, "spec_json")?)?;
        write_handle(out, generate(&spec)?)
    })
}

/// Releases a handle. Null is a no-op.
///
/// # Safety
/// `system` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fk_system_free(system: *mut FkSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Ambient dimension; 0 for null.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fk_system_dim(system: *const FkSystem) -> usize {
    system.as_ref().map_or(0, |s| s.inner.dim())
}

/// Number of vectors; 0 for null.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fk_system_count(system: *const FkSystem) -> usize {
    system.as_ref().map_or(0, |s| s.inner.count())
}

/// Copies the columns out, column-major. `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fk_system_columns(
    system: *const FkSystem,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> FkStatus {
    guard(|| {
        let sys = system_ref(system)?;
        let m = sys.matrix();
        if len != m.len() {
            return Err(Error::DimensionMismatch {
                expected: m.len(),
                found: len,
            }
            .into());
        }
        if re.is_null() {
            return Err(Failure::null("re"));
        }
        let re = std::slice::from_raw_parts_mut(re, len);
        for (slot, z) in re.iter_mut().zip(m.iter()) {
            *slot = z.re;
        }
        if !im.is_null() {
            let im = std::slice::from_raw_parts_mut(im, len);
            for (slot, z) in im.iter_mut().zip(m.iter()) {
                *slot = z.im;
            }
        }
        Ok(())
    })
}

/// Frame bounds at `tolerance`.
///
/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_frame_report(
    system: *const FkSystem,
    tolerance: f64,
    out: *mut FkFrameReport,
) -> FkStatus {
    guard(|| {
        let r = frame_report(system_ref(system)?, tolerance);
        let report = FkFrameReport {
            lower_bound: r.lower_bound,
            upper_bound: r.upper_bound,
            min_norm: r.min_norm,
            max_norm: r.max_norm,
            is_tight: r.is_tight,
            is_spanning: r.is_spanning,
        };
        write_out(out, report, "out")
    })
}

/// The system `S^((a-1)/2) f_i`, whose frame operator is `S^a`.
///
/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_power_transform(
    system: *const FkSystem,
    a: f64,
    tolerance: f64,
    out: *mut *mut FkSystem,
) -> FkStatus {
    guard(|| {
        let transformed = power_transform(system_ref(system)?, a, tolerance)?;
        write_handle(out, transformed)
    })
}

/// Riesz basis constant; `INFINITY` for dependent systems.
///
/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_riesz_constant(system: *const FkSystem, out: *mut f64) -> FkStatus {
    guard(|| write_out(out, riesz_constant(system_ref(system)?).to_f64(), "out"))
}

/// All basis constants, Schauder constant in storage order.
///
/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_basis_metrics(
    system: *const FkSystem,
    out: *mut FkBasisMetrics,
) -> FkStatus {
    guard(|| {
        let m = basis_metrics(system_ref(system)?);
        let metrics = FkBasisMetrics {
            riesz: m.riesz.to_f64(),
            hilbertian: m.hilbertian,
            besselian: m.besselian.to_f64(),
            schauder: m.schauder.to_f64(),
            separation: m.separation,
        };
        write_out(out, metrics, "out")
    })
}

/// Selects `size` columns; writes `size` increasing indices to `indices` and
/// the smallest singular value of the selection to `bound`.
///
/// # Safety
/// `system` must be a live handle; `indices` must have room for `size`
/// entries; `bound` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_select(
    system: *const FkSystem,
    size: usize,
    method: FkSelectionMethod,
    indices: *mut usize,
    bound: *mut f64,
) -> FkStatus {
    guard(|| {
        let sys = system_ref(system)?;
        if indices.is_null() {
            return Err(Failure::null("indices"));
        }
        let result = match method {
            FkSelectionMethod::Exhaustive => select_exhaustive(sys, size)?,
            FkSelectionMethod::Greedy => select_greedy(sys, size)?,
        };
        std::slice::from_raw_parts_mut(indices, size).copy_from_slice(&result.subset);
        write_out(bound, result.certified_lower_bound, "bound")
    })
}

/// Runs an extraction and writes its trace as JSON; release with
/// [`fk_string_free`]. `delta` applies to frame mode; NaN selects the
/// largest admissible value.
///
/// # Safety
/// `system` must be a live handle; `trace_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_extract(
    system: *const FkSystem,
    mode: FkExtractionMode,
    eps: f64,
    c: f64,
    delta: f64,
    trace_json: *mut *mut c_char,
) -> FkStatus {
    guard(|| {
        let sys = system_ref(system)?;
        let trace = match mode {
            FkExtractionMode::Biorthogonal => extract_biorthogonal(sys, eps, c)?,
            FkExtractionMode::Frame => {
                extract_frame(sys, eps, c, (!delta.is_nan()).then_some(delta))?
            }
        };
        write_string(trace_json, io::trace_to_json(&trace)?)
    })
}

/// Nominal round-count bound for biorthogonal extraction.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_theoretical_bound(
    eps: f64,
    d: f64,
    l: f64,
    c: f64,
    out: *mut f64,
) -> FkStatus {
    guard(|| write_out(out, framekit::theoretical_bound(eps, d, l, c)?, "out"))
}

/// Releases a string returned by the library. Null is a no-op.
///
/// # Safety
/// `text` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fk_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
