//! C ABI for `cesaro-core`.
//!
//! Measures and series are opaque heap handles created by `*_from_*`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`CesaroStatus`]; on failure, [`cesaro_last_error_message`]
//! describes the error. JSON strings returned through `char **` must be
//! released with [`cesaro_string_free`].
//!
//! Status codes 2 and 3 coincide with the command-line exit codes.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cesaro_core::carleson::{self, CarlesonParams, ClassifyConfig};
use cesaro_core::report;
use cesaro_core::verify::{self, Theorem, VerifyConfig};
use cesaro_core::{norms, series, Error, EvalPoint, FunctionSpec, PowerSeries, RadialMeasure};
use num_complex::Complex64;

/// Opaque radial measure.
pub struct CesaroMeasure(RadialMeasure);

/// Opaque truncated power series.
pub struct CesaroSeries(PowerSeries);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CesaroStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Numerical = 3,
    Panic = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(e: Error) -> CesaroStatus {
    set_error(&e.to_string());
    match e.exit_code() {
        3 => CesaroStatus::Numerical,
        _ => CesaroStatus::InvalidInput,
    }
}

fn null(what: &str) -> CesaroStatus {
    set_error(&format!("null pointer: {what}"));
    CesaroStatus::NullPointer
}

fn guard(f: impl FnOnce() -> CesaroStatus) -> CesaroStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == CesaroStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => {
            set_error("internal panic");
            CesaroStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, CesaroStatus> {
    if s.is_null() {
        return Err(null("string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(Error::InvalidInput("string is not valid UTF-8".into())))
}

fn into_c_string(text: String, out: *mut *mut c_char) -> CesaroStatus {
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            CesaroStatus::Ok
        }
        Err(_) => fail(Error::Numerical("output contains a NUL byte".into())),
    }
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return fail(e),
        }
    };
}

macro_rules! deref {
    ($p:expr, $what:literal) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return null($what),
        }
    };
}

/// Message describing the last failed call on this thread; empty after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cesaro_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a measure file (`{"components": [...]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cesaro_measure_from_json(json: *const c_char, out: *mut *mut CesaroMeasure) -> CesaroStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let m = try_status!(RadialMeasure::from_json(text));
        *out = Box::into_raw(Box::new(CesaroMeasure(m)));
        CesaroStatus::Ok
    })
}

/// # Safety
/// `m` must come from [`cesaro_measure_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cesaro_measure_free(m: *mut CesaroMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live measure handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cesaro_measure_total_mass(m: *const CesaroMeasure, out: *mut f64) -> CesaroStatus {
    guard(|| {
        let m = deref!(m, "measure");
        if out.is_null() {
            return null("out");
        }
        *out = try_status!(m.0.total_mass());
        CesaroStatus::Ok
    })
}

/// `mu_n`.
///
/// # Safety
/// `m` must be a live measure handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cesaro_measure_moment(m: *const CesaroMeasure, n: usize, out: *mut f64) -> CesaroStatus {
    guard(|| {
        let m = deref!(m, "measure");
        if out.is_null() {
            return null("out");
        }
        *out = try_status!(m.0.moment(n));
        CesaroStatus::Ok
    })
}

/// `nu([t, 1))`.
///
/// # Safety
/// `m` must be a live measure handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cesaro_measure_tail(m: *const CesaroMeasure, t: f64, out: *mut f64) -> CesaroStatus {
    guard(|| {
        let m = deref!(m, "measure");
        if out.is_null() {
            return null("out");
        }
        *out = try_status!(m.0.tail(t));
        CesaroStatus::Ok
    })
}

/// Writes `mu_0..mu_{n_max}` into `buf`, which must hold `len >= n_max + 1` values.
///
/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cesaro_measure_moments(
    m: *const CesaroMeasure,
    n_max: usize,
    buf: *mut f64,
    len: usize,
) -> CesaroStatus {
    guard(|| {
        let m = deref!(m, "measure");
        if buf.is_null() {
            return null("buf");
        }
        if len < n_max.saturating_add(1) {
            return fail(Error::InvalidInput(format!(
                "buffer holds {len} values, need {}",
                n_max + 1
            )));
        }
        let mu = try_status!(m.0.moments(n_max));
        std::slice::from_raw_parts_mut(buf, n_max + 1).copy_from_slice(mu.values());
        CesaroStatus::Ok
    })
}

/// Series from `len` coefficients; `im` may be null for real coefficients.
///
/// # Safety
/// `re` (and `im` when non-null) must be valid for `len` reads.
#[no_mangle]
pub unsafe extern "C" fn cesaro_series_from_coeffs(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut CesaroSeries,
) -> CesaroStatus {
    guard(|| {
        if re.is_null() {
            return null("re");
        }
        if out.is_null() {
            return null("out");
        }
        let re = std::slice::from_raw_parts(re, len);
        let coeffs = if im.is_null() {
            re.iter().map(|r| Complex64::new(*r, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter().zip(im).map(|(r, i)| Complex64::new(*r, *i)).collect()
        };
        let s = try_status!(PowerSeries::new(coeffs));
        *out = Box::into_raw(Box::new(CesaroSeries(s)));
        CesaroStatus::Ok
    })
}

/// Series from a function file; builtins without a degree get `default_degree`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cesaro_series_from_json(
    json: *const c_char,
    default_degree: usize,
    out: *mut *mut CesaroSeries,
) -> CesaroStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let spec = try_status!(FunctionSpec::from_json(text));
        let s = try_status!(spec.build(default_degree));
        *out = Box::into_raw(Box::new(CesaroSeries(s)));
        CesaroStatus::Ok
    })
}

/// # Safety
/// `s` must come from a `cesaro_series_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cesaro_series_free(s: *mut CesaroSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live series handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cesaro_series_degree(s: *const CesaroSeries, out: *mut usize) -> CesaroStatus {
    guard(|| {
        let s = deref!(s, "series");
        if out.is_null() {
            return null("out");
        }
        *out = s.0.degree();
        CesaroStatus::Ok
    })
}

/// Copies the `degree + 1` coefficients into `re` and `im`, each of length `len`.
///
/// # Safety
/// `re` and `im` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cesaro_series_coeffs(
    s: *const CesaroSeries,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> CesaroStatus {
    guard(|| {
        let s = deref!(s, "series");
        if re.is_null() || im.is_null() {
            return null("re/im");
        }
        let c = s.0.coeffs();
        if len < c.len() {
            return fail(Error::InvalidInput(format!(
                "buffers hold {len} values, need {}",
                c.len()
            )));
        }
        let re = std::slice::from_raw_parts_mut(re, c.len());
        let im = std::slice::from_raw_parts_mut(im, c.len());
        for (k, z) in c.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        CesaroStatus::Ok
    })
}

/// Evaluates the series at `z = re + i im`, `|z| <= 1 - 2^-40`.
///
/// # Safety
/// `s` must be a live series handle; `out_re` and `out_im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cesaro_series_eval(
    s: *const CesaroSeries,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> CesaroStatus {
    guard(|| {
        let s = deref!(s, "series");
        if out_re.is_null() || out_im.is_null() {
            return null("out");
        }
        let z = try_status!(EvalPoint::new(Complex64::new(re, im)));
        let v = s.0.eval(z);
        *out_re = v.re;
        *out_im = v.im;
        CesaroStatus::Ok
    })
}

/// `C_mu f` truncated at the degree of `f`.
///
/// # Safety
/// `m` and `f` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cesaro_apply(
    m: *const CesaroMeasure,
    f: *const CesaroSeries,
    out: *mut *mut CesaroSeries,
) -> CesaroStatus {
    guard(|| {
        let m = deref!(m, "measure");
        let f = deref!(f, "series");
        if out.is_null() {
            return null("out");
        }
        let mu = try_status!(m.0.moments(f.0.degree()));
        let g = try_status!(series::cesaro_like(&mu, &f.0));
        *out = Box::into_raw(Box::new(CesaroSeries(g)));
        CesaroStatus::Ok
    })
}

/// # Safety
/// `s` must be a live series handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cesaro_bloch_norm(s: *const CesaroSeries, out: *mut f64) -> CesaroStatus {
    guard(|| {
        let s = deref!(s, "series");
        if out.is_null() {
            return null("out");
        }
        *out = norms::bloch_norm(&s.0).value;
        CesaroStatus::Ok
    })
}

/// # Safety
/// `s` must be a live series handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cesaro_besov_norm(s: *const CesaroSeries, p: f64, out: *mut f64) -> CesaroStatus {
    guard(|| {
        let s = deref!(s, "series");
        if out.is_null() {
            return null("out");
        }
        *out = try_status!(norms::besov_norm(&s.0, p)).value;
        CesaroStatus::Ok
    })
}

/// # Safety
/// `s` must be a live series handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cesaro_mean_lipschitz_norm(
    s: *const CesaroSeries,
    p: f64,
    alpha: f64,
    out: *mut f64,
) -> CesaroStatus {
    guard(|| {
        let s = deref!(s, "series");
        if out.is_null() {
            return null("out");
        }
        *out = try_status!(norms::mean_lipschitz_norm(&s.0, p, alpha)).value;
        CesaroStatus::Ok
    })
}

/// Classifier verdict for `(s, alpha)` with default probes, as JSON.
///
/// # Safety
/// `m` must be a live handle; `out` receives a string for [`cesaro_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cesaro_classify_json(
    m: *const CesaroMeasure,
    s: f64,
    alpha: f64,
    out: *mut *mut c_char,
) -> CesaroStatus {
    guard(|| {
        let m = deref!(m, "measure");
        if out.is_null() {
            return null("out");
        }
        let params = try_status!(CarlesonParams::new(s, alpha));
        let verdict = try_status!(carleson::classify(&m.0, &params, &ClassifyConfig::default()));
        into_c_string(report::to_json(&verdict), out)
    })
}

/// Verification report as JSON; `theorem` is `"boundedness"` or `"compactness"`.
///
/// # Safety
/// `m` must be a live handle, `theorem` NUL-terminated; `out` receives a
/// string for [`cesaro_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cesaro_verify_json(
    m: *const CesaroMeasure,
    theorem: *const c_char,
    p: f64,
    s: f64,
    ladder_depth: u32,
    out: *mut *mut c_char,
) -> CesaroStatus {
    guard(|| {
        let m = deref!(m, "measure");
        if out.is_null() {
            return null("out");
        }
        let name = match read_str(theorem) {
            Ok(t) => t,
            Err(st) => return st,
        };
        let theorem: Theorem = try_status!(name.parse());
        let config = VerifyConfig {
            ladder_depth,
            ..VerifyConfig::default()
        };
        let rep = try_status!(verify::run_theorem(theorem, &m.0, p, s, &config));
        into_c_string(report::to_json(&rep), out)
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cesaro_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
