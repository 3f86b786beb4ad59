//! C ABI over the syntomic engine.
//!
//! Every fallible call returns a `SynStatus` and writes its result through an out
//! pointer. Handles are opaque and owned by the caller, who releases them with the
//! matching `_free`. On failure `syn_last_error` holds a message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use syntomic::charclass::{product_model, verify_wu_theorem};
use syntomic::fgauge::{global_sections, LatticeGauge};
use syntomic::scalar::Base;
use syntomic::steenrod::json::ElementJson;
use syntomic::steenrod::{parse_combination, Bidegree, Element, SteenrodAlgebra, SteenrodError};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Mismatch = 4,
    Engine = 5,
    Panic = 6,
}

/// A Steenrod algebra for one prime and base.
pub struct SynAlgebra(SteenrodAlgebra);

/// An element in admissible normal form.
pub struct SynElement(Element);

struct Fail(SynStatus, String);

impl From<SteenrodError> for Fail {
    fn from(e: SteenrodError) -> Self {
        let s = match e {
            SteenrodError::Parse(_) => SynStatus::Parse,
            SteenrodError::Mismatch(_) => SynStatus::Mismatch,
            _ => SynStatus::Engine,
        };
        Fail(s, e.to_string())
    }
}

fn engine<E: std::fmt::Display>(e: E) -> Fail {
    Fail(SynStatus::Engine, e.to_string())
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SynStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SynStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            SynStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(SynStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(SynStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(SynStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(SynStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(v);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn syn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn syn_status_name(s: SynStatus) -> *const c_char {
    let m: &'static CStr = match s {
        SynStatus::Ok => c"ok",
        SynStatus::NullPointer => c"null pointer",
        SynStatus::InvalidUtf8 => c"invalid UTF-8",
        SynStatus::Parse => c"parse error",
        SynStatus::Mismatch => c"prime or base mismatch",
        SynStatus::Engine => c"engine error",
        SynStatus::Panic => c"internal panic",
    };
    m.as_ptr()
}

/// `base` is "k" or "O".
///
/// # Safety
/// `base` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn syn_algebra_new(p: u32, base: *const c_char, out: *mut *mut SynAlgebra) -> SynStatus {
    guard(|| {
        let b = Base::parse(text(base, "base")?).map_err(|e| Fail(SynStatus::Parse, e.to_string()))?;
        let a = SteenrodAlgebra::with_params(p, b)?;
        put(out, boxed(SynAlgebra(a)))
    })
}

/// # Safety
/// `a` must come from `syn_algebra_new` and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn syn_algebra_free(a: *mut SynAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Number of admissible monomials in bidegree (deg, wt).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn syn_algebra_basis_count(a: *const SynAlgebra, deg: i64, wt: i64, out: *mut usize) -> SynStatus {
    guard(|| {
        let a = borrow(a, "algebra")?;
        put(out, a.0.admissible_basis(Bidegree::new(deg, wt)).len())
    })
}

/// Reads "Sq2 Sq2 + tau Sq3 Sq1" style text or element JSON, reduced to normal form.
///
/// # Safety
/// Pointers must be valid; `src` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn syn_element_parse(
    a: *const SynAlgebra,
    src: *const c_char,
    out: *mut *mut SynElement,
) -> SynStatus {
    guard(|| {
        let a = borrow(a, "algebra")?;
        let s = text(src, "source")?;
        let e = if s.trim_start().starts_with('{') {
            let j: ElementJson =
                serde_json::from_str(s).map_err(|e| Fail(SynStatus::Parse, format!("element JSON: {e}")))?;
            j.to_element(&a.0)?
        } else {
            a.0.adem_reduce(&parse_combination(s, a.0.ring())?)
        };
        put(out, boxed(SynElement(e)))
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn syn_element_multiply(
    a: *const SynAlgebra,
    x: *const SynElement,
    y: *const SynElement,
    out: *mut *mut SynElement,
) -> SynStatus {
    guard(|| {
        let a = borrow(a, "algebra")?;
        let z = a.0.multiply(&borrow(x, "left factor")?.0, &borrow(y, "right factor")?.0)?;
        put(out, boxed(SynElement(z)))
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn syn_element_antipode(
    a: *const SynAlgebra,
    x: *const SynElement,
    out: *mut *mut SynElement,
) -> SynStatus {
    guard(|| {
        let a = borrow(a, "algebra")?;
        let z = a.0.antipode(&borrow(x, "element")?.0)?;
        put(out, boxed(SynElement(z)))
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn syn_element_is_zero(x: *const SynElement, out: *mut bool) -> SynStatus {
    guard(|| put(out, borrow(x, "element")?.0.is_zero()))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn syn_element_equal(x: *const SynElement, y: *const SynElement, out: *mut bool) -> SynStatus {
    guard(|| put(out, borrow(x, "left")?.0 == borrow(y, "right")?.0))
}

/// Text form; release with `syn_string_free`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn syn_element_to_text(x: *const SynElement, out: *mut *mut c_char) -> SynStatus {
    guard(|| put(out, owned_string(borrow(x, "element")?.0.to_text())))
}

/// JSON form; release with `syn_string_free`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn syn_element_to_json(x: *const SynElement, out: *mut *mut c_char) -> SynStatus {
    guard(|| {
        let j = serde_json::to_string(&ElementJson::from_element(&borrow(x, "element")?.0)).map_err(engine)?;
        put(out, owned_string(j))
    })
}

/// # Safety
/// `x` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn syn_element_free(x: *mut SynElement) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// # Safety
/// `s` must be a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn syn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Checks Sq(v) = w on a model named like "P3" or "P1xP2".
///
/// # Safety
/// Pointers must be valid; `model` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn syn_verify_wu(model: *const c_char, passed: *mut bool) -> SynStatus {
    guard(|| {
        let name = text(model, "model")?;
        let dims = name
            .split(['x', 'X'])
            .map(|f| f.trim().strip_prefix('P').and_then(|n| n.parse::<u32>().ok()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Fail(SynStatus::Parse, format!("unknown model {name:?}")))?;
        let m = product_model(&dims).map_err(engine)?;
        let r = verify_wu_theorem(&m).map_err(engine)?;
        put(passed, r.passed())
    })
}

/// dim H⁰ and H¹ of gauge cohomology of the twisted structure gauge O{twist} over F_{p^f}, mod p.
///
/// # Safety
/// Out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn syn_gauge_sections(p: u64, f: usize, twist: i64, h0: *mut usize, h1: *mut usize) -> SynStatus {
    guard(|| {
        let g = LatticeGauge::trivial(p, f).map_err(engine)?.twist(twist).to_gauge(1).map_err(engine)?;
        let (a, b) = global_sections(&g).map_err(engine)?;
        put(h0, a)?;
        put(h1, b)
    })
}
