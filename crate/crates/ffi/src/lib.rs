//! C ABI over the `k3gw` engine.
//!
//! Every call returns a [`K3gwStatus`]. On failure, [`k3gw_last_error`] describes the
//! most recent error on the calling thread. Strings returned through out-pointers are
//! owned by the caller and released with [`k3gw_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use k3gw::dsl::DslBracket;
use k3gw::engine::{Engine, EngineError, RemovalRoute};
use k3gw::kernels::{a_series, b_series, c_series};
use k3gw::polyfit::{fit_family, FamilySpec, PolyfitError};
use k3gw::rational::fmt_rational;
use k3gw::virasoro::{solve_w, VirasoroError};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum K3gwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    RankBudget = 4,
    Computation = 5,
    Panic = 6,
}

/// Opaque evaluation context holding the memo table.
pub struct K3gwEngine {
    inner: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

const STACK: usize = 512 << 20;

struct Fail(K3gwStatus, String);

impl From<EngineError> for Fail {
    fn from(e: EngineError) -> Self {
        let s = match e {
            EngineError::RankBudgetExceeded { .. } => K3gwStatus::RankBudget,
            _ => K3gwStatus::Computation,
        };
        Fail(s, e.to_string())
    }
}

impl From<PolyfitError> for Fail {
    fn from(e: PolyfitError) -> Self {
        match e {
            PolyfitError::Engine(inner) => inner.into(),
            PolyfitError::Dsl(_) | PolyfitError::KindClassificationFailed(_) => Fail(K3gwStatus::Parse, e.to_string()),
            e => Fail(K3gwStatus::Computation, e.to_string()),
        }
    }
}

impl From<VirasoroError> for Fail {
    fn from(e: VirasoroError) -> Self {
        match e {
            VirasoroError::Engine(inner) => inner.into(),
            e => Fail(K3gwStatus::Computation, e.to_string()),
        }
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f` on a thread with a deep stack, mapping panics and errors to a status.
fn guarded<F>(f: F) -> K3gwStatus
where
    F: FnOnce() -> Result<(), Fail> + Send,
{
    clear_error();
    let joined = std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK)
            .spawn_scoped(s, || catch_unwind(AssertUnwindSafe(f)))
            .map(|h| h.join())
    });
    match joined {
        Ok(Ok(Ok(Ok(())))) => K3gwStatus::Ok,
        Ok(Ok(Ok(Err(Fail(s, msg))))) => {
            set_error(&msg);
            s
        }
        Err(e) => {
            set_error(&format!("cannot start worker thread: {e}"));
            K3gwStatus::Computation
        }
        _ => {
            set_error("internal panic");
            K3gwStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(K3gwStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(K3gwStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// `out` is null or valid for writes.
unsafe fn write_out(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(K3gwStatus::NullPointer, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|e| Fail(K3gwStatus::Computation, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// Address-carrying wrapper so raw pointers can cross into the worker thread.
struct Ptr<T>(T);
unsafe impl<T> Send for Ptr<T> {}

fn engine_mut<'a>(p: *mut K3gwEngine) -> Result<&'a mut Engine, Fail> {
    // SAFETY: callers pass a handle from `k3gw_engine_new` that is not used concurrently.
    unsafe { p.as_mut() }.map(|e| &mut e.inner).ok_or(Fail(K3gwStatus::NullPointer, "engine is null".into()))
}

/// New engine. `general_route` nonzero forces the general removal of `tau_k(1)`.
/// Returns null only on allocation failure.
#[no_mangle]
pub extern "C" fn k3gw_engine_new(general_route: i32) -> *mut K3gwEngine {
    let route = if general_route != 0 { RemovalRoute::General } else { RemovalRoute::Auto };
    catch_unwind(|| Box::into_raw(Box::new(K3gwEngine { inner: Engine::new().with_route(route) })))
        .unwrap_or(ptr::null_mut())
}

/// # Safety
/// `engine` is null or a handle from [`k3gw_engine_new`] not freed before.
#[no_mangle]
pub unsafe extern "C" fn k3gw_engine_free(engine: *mut K3gwEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Number of memoized brackets held by `engine`, or 0 for null.
///
/// # Safety
/// `engine` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn k3gw_engine_memo_len(engine: *const K3gwEngine) -> usize {
    engine.as_ref().map_or(0, |e| e.inner.memo_len())
}

/// Exact invariant of `bracket` in the class with `beta^2 = 2 * beta_sq_half`, as `num/den`.
///
/// # Safety
/// `engine` is a live handle; `bracket` a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k3gw_invariant(
    engine: *mut K3gwEngine,
    bracket: *const c_char,
    beta_sq_half: i64,
    out: *mut *mut c_char,
) -> K3gwStatus {
    let (e, b, o) = (Ptr(engine), Ptr(bracket), Ptr(out));
    guarded(move || {
        let (e, b, o) = (e, b, o);
        let eng = engine_mut(e.0)?;
        let src = read_str(b.0, "bracket")?;
        let parsed = DslBracket::parse(src).map_err(|x| Fail(K3gwStatus::Parse, x.to_string()))?;
        let ins = parsed.insertions(beta_sq_half).map_err(|x| Fail(K3gwStatus::Parse, x.to_string()))?;
        let v = eng.evaluate_insertions(&ins)?;
        write_out(o.0, fmt_rational(&v.coefficient_at(beta_sq_half)))
    })
}

/// Kernel `A_k` (`which = 'A'`), `B_k` (`'B'`) or `C_{k,l}` (`'C'`) as a polynomial in `G2, G4, G6`.
///
/// # Safety
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k3gw_kernel(which: c_char, k: u32, l: u32, out: *mut *mut c_char) -> K3gwStatus {
    let o = Ptr(out);
    guarded(move || {
        let o = o;
        let x = match which as u8 {
            b'A' | b'a' => a_series(k),
            b'B' | b'b' => b_series(k),
            b'C' | b'c' => c_series(k, l),
            other => return Err(Fail(K3gwStatus::Parse, format!("unknown kernel {:?}", other as char))),
        };
        write_out(o.0, x.to_string())
    })
}

/// Polynomial fit of a family such as `tau(k,pt) tau(l,pt)`, as a JSON report.
///
/// # Safety
/// As for [`k3gw_invariant`].
#[no_mangle]
pub unsafe extern "C" fn k3gw_fit(
    engine: *mut K3gwEngine,
    family: *const c_char,
    beta_sq_half: i64,
    out: *mut *mut c_char,
) -> K3gwStatus {
    let (e, f, o) = (Ptr(engine), Ptr(family), Ptr(out));
    guarded(move || {
        let (e, f, o) = (e, f, o);
        let eng = engine_mut(e.0)?;
        let spec = FamilySpec::parse(read_str(f.0, "family")?, beta_sq_half)?;
        let r = fit_family(eng, &spec)?;
        write_out(o.0, serde_json::to_string(&r).expect("serializable"))
    })
}

/// Coefficients `w_{k,m}` as a JSON report.
///
/// # Safety
/// `engine` is a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn k3gw_virasoro(engine: *mut K3gwEngine, k: i64, out: *mut *mut c_char) -> K3gwStatus {
    let (e, o) = (Ptr(engine), Ptr(out));
    guarded(move || {
        let (e, o) = (e, o);
        let r = solve_w(engine_mut(e.0)?, k)?;
        write_out(o.0, serde_json::to_string(&r).expect("serializable"))
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or a string from this library not freed before.
#[no_mangle]
pub unsafe extern "C" fn k3gw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn k3gw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn k3gw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;

    fn take(p: *mut c_char) -> String {
        let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
        unsafe { k3gw_string_free(p) };
        s
    }

    fn last_error() -> String {
        let p = k3gw_last_error();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
    }

    #[test]
    fn kernel_display() {
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { k3gw_kernel(b'A' as c_char, 2, 0, &mut out) }, K3gwStatus::Ok);
        assert_eq!(take(out), "2*G2^2 + 1/6*G4");
        assert!(k3gw_last_error().is_null());
    }

    #[test]
    fn invariant_and_errors() {
        let e = k3gw_engine_new(0);
        let mut out = ptr::null_mut();
        let b = CString::new("tau(0,pt) tau(0,pt)").unwrap();
        assert_eq!(unsafe { k3gw_invariant(e, b.as_ptr(), 1, &mut out) }, K3gwStatus::Ok);
        assert_eq!(take(out), "1");
        assert!(unsafe { k3gw_engine_memo_len(e) } > 0);

        let bad = CString::new("tau(0,nope)").unwrap();
        assert_eq!(unsafe { k3gw_invariant(e, bad.as_ptr(), 1, &mut out) }, K3gwStatus::Parse);
        assert!(last_error().contains("nope"));

        assert_eq!(unsafe { k3gw_invariant(e, ptr::null(), 1, &mut out) }, K3gwStatus::NullPointer);
        assert_eq!(unsafe { k3gw_invariant(ptr::null_mut(), b.as_ptr(), 1, &mut out) }, K3gwStatus::NullPointer);
        let invalid = [0xffu8, 0];
        assert_eq!(
            unsafe { k3gw_invariant(e, invalid.as_ptr() as *const c_char, 1, &mut out) },
            K3gwStatus::InvalidUtf8
        );
        unsafe { k3gw_engine_free(e) };
    }

    #[test]
    fn rank_budget_is_reported() {
        let e = k3gw_engine_new(0);
        let mut out = ptr::null_mut();
        let pairs: Vec<String> = (1..=10).map(|p| format!("tau(1,e{p}) tau(1,f{p})")).collect();
        let b = CString::new(format!("tau(2,one) {}", pairs.join(" "))).unwrap();
        assert_eq!(unsafe { k3gw_invariant(e, b.as_ptr(), 0, &mut out) }, K3gwStatus::RankBudget);
        assert!(!last_error().is_empty());
        unsafe { k3gw_engine_free(e) };
    }

    #[test]
    fn virasoro_report() {
        let e = k3gw_engine_new(0);
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { k3gw_virasoro(e, 2, &mut out) }, K3gwStatus::Ok);
        assert!(take(out).contains(r#""w":{"0":"-3/4"}"#));
        unsafe { k3gw_engine_free(e) };
    }

    #[test]
    fn version_is_static() {
        let v = unsafe { CStr::from_ptr(k3gw_version()) }.to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}
