//! C interface to `hutchinf`.
//!
//! Systems and attractor approximations are opaque heap handles owned by the
//! caller and released with the matching `_free` function. Every fallible
//! call returns a [`HutchinfStatus`]; the message of the most recent failure
//! on the calling thread is available through [`hutchinf_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hutchinf::config::ExperimentConfig;
use hutchinf::engine::{self, AttractorApprox};
use hutchinf::maps::GifsSystem;
use hutchinf::metric::{hausdorff, BaseMetric, FiniteSet};
use hutchinf::{systems, Error};

/// Bumped whenever a signature or the meaning of a status code changes.
pub const HUTCHINF_ABI_VERSION: u32 = 1;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HutchinfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotContractive = 3,
    ResourceCap = 4,
    Unsupported = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HutchinfMetric {
    Euclidean = 0,
    Maximum = 1,
    Absolute = 2,
}

/// A generalized iterated function system.
pub struct HutchinfSystem(GifsSystem);

/// A finite approximation of an attractor with its certified error.
pub struct HutchinfAttractor(AttractorApprox);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> HutchinfStatus {
    match e {
        Error::NotContractive(_) => HutchinfStatus::NotContractive,
        Error::ResourceCap(_) => HutchinfStatus::ResourceCap,
        Error::Unsupported(_) => HutchinfStatus::Unsupported,
        Error::Io(_) => HutchinfStatus::Io,
        _ => HutchinfStatus::InvalidArgument,
    }
}

enum Fail {
    Null(&'static str),
    Small(usize),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HutchinfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HutchinfStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            HutchinfStatus::NullPointer
        }
        Ok(Err(Fail::Small(need))) => {
            set_error(format!("buffer too small: {need} values needed"));
            HutchinfStatus::BufferTooSmall
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            HutchinfStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Lib(Error::Parse(format!("{what} is not UTF-8"))))
}

unsafe fn put<T>(out: *mut T, v: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(v);
    Ok(())
}

#[no_mangle]
pub extern "C" fn hutchinf_abi_version() -> u32 {
    HUTCHINF_ABI_VERSION
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length plus one, so a
/// return value above `cap` means truncation.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn hutchinf_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Builds a named system: "planar", "sup-pair", "sup-single",
/// "sup-interval" or "cantor".
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hutchinf_system_builtin(name: *const c_char, out: *mut *mut HutchinfSystem) -> HutchinfStatus {
    guard(|| {
        let name = c_str(name, "name")?;
        let sys = systems::by_name(name)?;
        put(out, Box::into_raw(Box::new(HutchinfSystem(sys))), "out")
    })
}

/// Builds the system described by an experiment configuration document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hutchinf_system_from_json(json: *const c_char, out: *mut *mut HutchinfSystem) -> HutchinfStatus {
    guard(|| {
        let text = c_str(json, "json")?;
        let sys = ExperimentConfig::from_json(text)?.build_system()?;
        put(out, Box::into_raw(Box::new(HutchinfSystem(sys))), "out")
    })
}

/// # Safety
/// `sys` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hutchinf_system_free(sys: *mut HutchinfSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Ambient dimension, or 0 for a null handle.
///
/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hutchinf_system_dim(sys: *const HutchinfSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.dim())
}

/// Certified Lipschitz constant of the system; fails with
/// `NotContractive` when no certificate is attached.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hutchinf_system_lipschitz(sys: *const HutchinfSystem, out: *mut f64) -> HutchinfStatus {
    guard(|| {
        let s = deref(sys, "sys")?;
        let l = s.0.l_sys().ok_or_else(|| Error::NotContractive("no Lipschitz certificate".into()))?;
        put(out, l, "out")
    })
}

/// Approximates the attractor to Hausdorff error at most `tol`.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hutchinf_attractor_compute(
    sys: *const HutchinfSystem,
    tol: f64,
    out: *mut *mut HutchinfAttractor,
) -> HutchinfStatus {
    guard(|| {
        let s = deref(sys, "sys")?;
        let a = engine::attractor(&s.0, tol)?;
        put(out, Box::into_raw(Box::new(HutchinfAttractor(a))), "out")
    })
}

/// # Safety
/// `a` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hutchinf_attractor_free(a: *mut HutchinfAttractor) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hutchinf_attractor_len(a: *const HutchinfAttractor) -> usize {
    a.as_ref().map_or(0, |a| a.0.cloud.len())
}

/// Point dimension, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hutchinf_attractor_dim(a: *const HutchinfAttractor) -> usize {
    a.as_ref().map_or(0, |a| a.0.cloud.dim())
}

/// Certified Hausdorff distance from the approximation to the attractor.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hutchinf_attractor_error(a: *const HutchinfAttractor, out: *mut f64) -> HutchinfStatus {
    guard(|| put(out, deref(a, "attractor")?.0.err, "out"))
}

/// Copies the coordinates, point after point, into `buf`. Needs
/// `len * dim` slots; with fewer nothing is written and `BufferTooSmall`
/// is returned.
///
/// # Safety
/// `a` must be a live handle; `buf` must be valid for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn hutchinf_attractor_points(a: *const HutchinfAttractor, buf: *mut f64, cap: usize) -> HutchinfStatus {
    guard(|| {
        let flat = deref(a, "attractor")?.0.cloud.flat();
        if cap < flat.len() {
            return Err(Fail::Small(flat.len()));
        }
        if buf.is_null() {
            return Err(Fail::Null("buf"));
        }
        std::ptr::copy_nonoverlapping(flat.as_ptr(), buf, flat.len());
        Ok(())
    })
}

/// Hausdorff distance between two finite sets given as flat coordinate
/// arrays of `a_len` and `b_len` points of dimension `dim`.
///
/// # Safety
/// `a` and `b` must be valid for `a_len * dim` and `b_len * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn hutchinf_hausdorff(
    a: *const f64,
    a_len: usize,
    b: *const f64,
    b_len: usize,
    dim: usize,
    metric: HutchinfMetric,
    out: *mut f64,
) -> HutchinfStatus {
    guard(|| {
        if a.is_null() || b.is_null() {
            return Err(Fail::Null("points"));
        }
        let (na, nb) = match (a_len.checked_mul(dim), b_len.checked_mul(dim)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(Error::InvalidParams("size overflow".into()).into()),
        };
        let sa = FiniteSet::from_flat(dim, std::slice::from_raw_parts(a, na).to_vec())?;
        let sb = FiniteSet::from_flat(dim, std::slice::from_raw_parts(b, nb).to_vec())?;
        let m = match metric {
            HutchinfMetric::Euclidean => BaseMetric::Euclidean,
            HutchinfMetric::Maximum => BaseMetric::Maximum,
            HutchinfMetric::Absolute => BaseMetric::Absolute,
        };
        put(out, hausdorff(&sa, &sb, m)?, "out")
    })
}
