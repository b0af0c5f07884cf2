//! C ABI over `tm_spectra`.
//!
//! Every fallible function returns a [`TmStatus`]; on failure the message is
//! available from [`tm_last_error_message`] on the same thread. Parameters
//! are opaque handles released with [`tm_parameter_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use tm_spectra::autocorr::{correlation_exponent, eta_table, lambda1};
use tm_spectra::measure::cylinder_measure;
use tm_spectra::pressure::{partition_pressure, pressure_c0, restricted_partition_pressure};
use tm_spectra::{Bracket, CircleParameter, DyadicWord, Error};

/// Opaque parameter handle.
pub struct TmParameter(CircleParameter);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TmBracket {
    pub lo: f64,
    pub hi: f64,
}

impl From<Bracket> for TmBracket {
    fn from(b: Bracket) -> Self {
        TmBracket {
            lo: b.lo(),
            hi: b.hi(),
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TmStatus {
    Ok = 0,
    InvalidArgument = 1,
    PrecisionGuard = 2,
    Internal = 3,
    NullPointer = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TmStatus {
    match e {
        Error::PrecisionGuard(_) => TmStatus::PrecisionGuard,
        Error::Invariant(_) => TmStatus::Internal,
        _ => TmStatus::InvalidArgument,
    }
}

enum Failure {
    Compute(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TmStatus::Ok,
        Ok(Err(Failure::Compute(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            TmStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            TmStatus::Panic
        }
    }
}

unsafe fn param_ref<'a>(p: *const TmParameter) -> Result<&'a CircleParameter, Failure> {
    p.as_ref().map(|p| &p.0).ok_or(Failure::Null("parameter"))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("output"));
    }
    out.write(v);
    Ok(())
}

unsafe fn new_parameter(out: *mut *mut TmParameter, p: tm_spectra::Result<CircleParameter>) -> TmStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("output"));
        }
        let handle = Box::into_raw(Box::new(TmParameter(p?)));
        out.write(handle);
        Ok(())
    })
}

/// Exact parameter `p/q` reduced modulo one.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tm_parameter_from_ratio(p: i64, q: u64, out: *mut *mut TmParameter) -> TmStatus {
    new_parameter(out, CircleParameter::from_ratio(p, q))
}

/// Floating-point parameter reduced modulo one.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tm_parameter_from_real(c: f64, out: *mut *mut TmParameter) -> TmStatus {
    new_parameter(out, CircleParameter::from_real(c))
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `param` must come from a constructor above and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tm_parameter_free(param: *mut TmParameter) {
    if !param.is_null() {
        drop(Box::from_raw(param));
    }
}

/// Dominant eigenvalue of the correlation matrix.
///
/// # Safety
/// `param` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tm_lambda1(param: *const TmParameter, out: *mut TmBracket) -> TmStatus {
    guard(|| write_out(out, lambda1(param_ref(param)?)?.into()))
}

/// `D_2 = log_2 lambda_1`.
///
/// # Safety
/// `param` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tm_correlation_exponent(param: *const TmParameter, out: *mut TmBracket) -> TmStatus {
    guard(|| write_out(out, correlation_exponent(param_ref(param)?)?.into()))
}

/// Partition pressure at temperature `t`, depth `n`, grid depth `grid_depth`.
///
/// # Safety
/// `param` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tm_partition_pressure(
    param: *const TmParameter,
    t: f64,
    n: u32,
    grid_depth: u32,
    out: *mut TmBracket,
) -> TmStatus {
    guard(|| {
        let est = partition_pressure(param_ref(param)?, t, n, grid_depth)?;
        write_out(out, est.value.into())
    })
}

/// Partition pressure over words avoiding the forbidden `(m+1)`-words.
///
/// # Safety
/// `param` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tm_restricted_pressure(
    param: *const TmParameter,
    t: f64,
    n: u32,
    m: u32,
    out: *mut TmBracket,
) -> TmStatus {
    guard(|| {
        let est = restricted_partition_pressure(param_ref(param)?, t, n, m)?;
        write_out(out, est.value.into())
    })
}

/// `max((1 - 2t) log 2, 0)`, the pressure at `c = 0`.
#[no_mangle]
pub extern "C" fn tm_pressure_c0(t: f64) -> f64 {
    pressure_c0(t)
}

/// Writes `eta_0, ..., eta_{len-1}` into `re` and `im`.
///
/// # Safety
/// `param` must be a live handle; `re` and `im` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tm_eta(
    param: *const TmParameter,
    len: usize,
    re: *mut f64,
    im: *mut f64,
) -> TmStatus {
    guard(|| {
        let p = param_ref(param)?;
        if len == 0 {
            return Ok(());
        }
        if re.is_null() || im.is_null() {
            return Err(Failure::Null("output"));
        }
        let table = eta_table(p, (len - 1).max(1))?;
        let (re, im) = (
            std::slice::from_raw_parts_mut(re, len),
            std::slice::from_raw_parts_mut(im, len),
        );
        for (k, z) in table.values().iter().take(len).enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Mass of the cylinder spelled by `len` bits (each 0 or 1), computed with
/// `buffer` extra orders of the partial product.
///
/// # Safety
/// `param` must be a live handle, `bits` must hold `len` bytes (or be null
/// when `len` is 0) and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tm_cylinder_measure(
    param: *const TmParameter,
    bits: *const u8,
    len: usize,
    buffer: u32,
    out: *mut TmBracket,
) -> TmStatus {
    guard(|| {
        let p = param_ref(param)?;
        let bits = if len == 0 {
            Vec::new()
        } else if bits.is_null() {
            return Err(Failure::Null("bits"));
        } else {
            std::slice::from_raw_parts(bits, len).to_vec()
        };
        let w = DyadicWord::new(bits)?;
        write_out(out, cylinder_measure(p, &w, buffer)?.estimate.into())
    })
}

/// Message of the last failure on this thread, empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
