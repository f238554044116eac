//! C interface to `nilsson`.
//!
//! Every fallible function returns a [`NilssonStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and can
//! be read with [`nilsson_last_error_message`]. Strings returned by the
//! library are owned by the caller and released with [`nilsson_string_free`];
//! handles are released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nilsson::error::{Error, ErrorKind};
use nilsson::exactnum::parse_rational;
use nilsson::gammakit::{beta_integral_closed, gamma_ratio_series, polygamma};
use nilsson::io::{
    expansion_from_value, expansion_to_value, meta, parse_json, to_pretty, values_to_value,
    Values,
};
use nilsson::multisum::{eval_multisum, BalancedTerm};
use nilsson::recurrence::{
    builtin, formal_expansion, formal_solutions, parse_recurrence, unroll, Recurrence,
};
use nilsson::series::{NilssonExpansion as Expansion, OmegaIndex};
use rug::Rational;
use serde_json::json;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NilssonStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    InvalidInput = 4,
    Precondition = 5,
    Numerical = 6,
    Internal = 7,
    Panic = 8,
}

/// Opaque recurrence handle.
pub struct NilssonRecurrence(Recurrence);

/// Opaque expansion handle.
pub struct NilssonExpansion(Expansion);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(NilssonStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match (&e, e.kind()) {
            (_, ErrorKind::Numerical) => NilssonStatus::Numerical,
            (_, ErrorKind::Internal) => NilssonStatus::Internal,
            (Error::Syntax { .. }, _) => NilssonStatus::Syntax,
            (
                Error::Precondition(_)
                | Error::SingularLeading { .. }
                | Error::UnboundedSupport { .. }
                | Error::DivisionByZero,
                _,
            ) => NilssonStatus::Precondition,
            _ => NilssonStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

fn null(what: &str) -> Failure {
    Failure(NilssonStatus::NullPointer, format!("{what} is NULL"))
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Outcome<()>) -> NilssonStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NilssonStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            NilssonStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(NilssonStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Outcome<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Outcome<()> {
    let c = CString::new(s)
        .map_err(|_| Failure(NilssonStatus::Internal, "output contains NUL".into()))?;
    write_out(out, c.into_raw(), "out")
}

fn rational(s: &str) -> Outcome<Rational> {
    Ok(parse_rational(s)?)
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nilsson_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty if none. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nilsson_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn nilsson_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a recurrence file (JSON text).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilsson_recurrence_from_json(
    json: *const c_char,
    out: *mut *mut NilssonRecurrence,
) -> NilssonStatus {
    guard(|| {
        let rec = parse_recurrence(read_str(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(NilssonRecurrence(rec))), "out")
    })
}

/// Looks up a shipped recurrence: `tet6j`, `apery` or `geometric`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilsson_recurrence_builtin(
    name: *const c_char,
    out: *mut *mut NilssonRecurrence,
) -> NilssonStatus {
    guard(|| {
        let rec = builtin(read_str(name, "name")?)?;
        write_out(out, Box::into_raw(Box::new(NilssonRecurrence(rec))), "out")
    })
}

/// # Safety
/// `rec` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn nilsson_recurrence_free(rec: *mut NilssonRecurrence) {
    if !rec.is_null() {
        drop(Box::from_raw(rec));
    }
}

/// # Safety
/// `rec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilsson_recurrence_order(
    rec: *const NilssonRecurrence,
    out: *mut usize,
) -> NilssonStatus {
    guard(|| {
        let rec = rec.as_ref().ok_or_else(|| null("rec"))?;
        write_out(out, rec.0.order(), "out")
    })
}

/// Exact values `a_lo..a_hi` as a values-file JSON string.
///
/// # Safety
/// `rec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilsson_recurrence_unroll_json(
    rec: *const NilssonRecurrence,
    lo: u64,
    hi: u64,
    out: *mut *mut c_char,
) -> NilssonStatus {
    guard(|| {
        let rec = rec.as_ref().ok_or_else(|| null("rec"))?;
        if lo > hi {
            return Err(Error::InvalidInput(format!("empty range {lo}..{hi}")).into());
        }
        let vals = unroll(&rec.0, hi)?.into_iter().skip(lo as usize).collect();
        let v = values_to_value(lo, &Values::Exact(vals), meta(&[]))?;
        write_string(out, to_pretty(&v))
    })
}

/// Formal solutions of the dominant branches at truncation `order`, as an
/// expansion handle with unit Stokes constants.
///
/// # Safety
/// `rec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilsson_recurrence_analyze(
    rec: *const NilssonRecurrence,
    order: usize,
    precision: u32,
    out: *mut *mut NilssonExpansion,
) -> NilssonStatus {
    guard(|| {
        let rec = rec.as_ref().ok_or_else(|| null("rec"))?;
        let sols = formal_solutions(&rec.0, order, precision)?;
        let e = formal_expansion(&sols, precision)?;
        write_out(out, Box::into_raw(Box::new(NilssonExpansion(e))), "out")
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilsson_expansion_from_json(
    json: *const c_char,
    out: *mut *mut NilssonExpansion,
) -> NilssonStatus {
    guard(|| {
        let e = expansion_from_value(&parse_json(read_str(json, "json")?)?)?;
        write_out(out, Box::into_raw(Box::new(NilssonExpansion(e))), "out")
    })
}

/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilsson_expansion_to_json(
    e: *const NilssonExpansion,
    out: *mut *mut c_char,
) -> NilssonStatus {
    guard(|| {
        let e = e.as_ref().ok_or_else(|| null("expansion"))?;
        let v = expansion_to_value(&e.0, meta(&[("precision", json!(e.0.precision()))]))?;
        write_string(out, to_pretty(&v))
    })
}

/// # Safety
/// `e` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn nilsson_expansion_free(e: *mut NilssonExpansion) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Partial sum up to the cut `(alpha, beta)` at `n`; `alpha` is a rational
/// literal such as `"3/2"`.
///
/// # Safety
/// `e` must be a live handle, `alpha` a NUL-terminated string and both
/// outputs writable.
#[no_mangle]
pub unsafe extern "C" fn nilsson_expansion_partial_sum(
    e: *const NilssonExpansion,
    alpha: *const c_char,
    beta: u32,
    n: u64,
    precision: u32,
    out_re: *mut f64,
    out_im: *mut f64,
) -> NilssonStatus {
    guard(|| {
        let e = e.as_ref().ok_or_else(|| null("expansion"))?;
        let cut = OmegaIndex::new(rational(read_str(alpha, "alpha")?)?, beta);
        let (re, im) = e.0.partial_sum(&cut, n, precision)?.to_f64();
        write_out(out_re, re, "out_re")?;
        write_out(out_im, im, "out_im")
    })
}

/// Values of a balanced multisum for `n = lo..hi`. `term` is a built-in name
/// (`apery-like`, `tet6j`) or a term JSON document.
///
/// # Safety
/// `term` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilsson_multisum_eval_json(
    term: *const c_char,
    lo: u64,
    hi: u64,
    out: *mut *mut c_char,
) -> NilssonStatus {
    guard(|| {
        let text = read_str(term, "term")?;
        let t = if text.trim_start().starts_with('{') {
            BalancedTerm::from_value(&parse_json(text)?)?
        } else {
            BalancedTerm::builtin(text)?
        };
        if lo > hi {
            return Err(Error::InvalidInput(format!("empty range {lo}..{hi}")).into());
        }
        let vals = (lo..=hi)
            .map(|n| eval_multisum(&t, n))
            .collect::<Result<Vec<_>, _>>()?;
        let v = values_to_value(lo, &Values::Exact(vals), meta(&[]))?;
        write_string(out, to_pretty(&v))
    })
}

/// Exact coefficients `c_0..c_order` of `Γ(n+1-γ)/Γ(n+1) ~ n^{-γ} Σ c_k n^{-k}`
/// as a JSON array of rational strings.
///
/// # Safety
/// `gamma` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilsson_gamma_series_json(
    gamma: *const c_char,
    order: usize,
    out: *mut *mut c_char,
) -> NilssonStatus {
    guard(|| {
        let g = rational(read_str(gamma, "gamma")?)?;
        let s = gamma_ratio_series(&g, order);
        let coeffs: Vec<String> = s.coefficients.iter().map(|c| c.to_string()).collect();
        write_string(out, serde_json::to_string(&coeffs).expect("strings serialize"))
    })
}

/// `I_{γ,β}(n) = ∫_0^∞ z^{γ-1} (log z)^β / (1+z)^{n+1} dz` from its closed form.
///
/// # Safety
/// `gamma` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilsson_beta_integral(
    gamma: *const c_char,
    beta: u32,
    n: u64,
    precision: u32,
    out: *mut f64,
) -> NilssonStatus {
    guard(|| {
        let g = rational(read_str(gamma, "gamma")?)?;
        let v = beta_integral_closed(&g, beta, n, precision)?;
        write_out(out, v.value.re().to_f64(), "out")
    })
}

/// `ψ^{(k)}(x)` for rational `x > 0`.
///
/// # Safety
/// `x` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilsson_polygamma(
    k: u32,
    x: *const c_char,
    precision: u32,
    out: *mut f64,
) -> NilssonStatus {
    guard(|| {
        let x = rational(read_str(x, "x")?)?;
        let v = polygamma(k, &x, precision)?;
        write_out(out, v.re().to_f64(), "out")
    })
}
