//! C ABI for the eproc library.
//!
//! Every function returns an [`EprocStatus`] and writes results through out
//! pointers. On failure the message is available from
//! [`eproc_last_error_message`] on the same thread until the next call.
//! Processes are opaque handles created from a JSON experiment config and
//! released with [`eproc_process_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use eproc::class::Observation;
use eproc::harness::ExperimentConfig;
use eproc::null::kl_inf_bounded_mean;
use eproc::prob::BoundedDistSpec;
use eproc::{
    first_crossing, kl_divergence, solve_largest_root, BoundedMeanNull, ConvexHullNull, EProcess, Error,
    FixedPointQuery, Pmf, SeededStream,
};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EprocStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad configuration, dimensions, probabilities or arguments.
    InvalidArgument = 2,
    /// The saddle solver could not certify its tolerance.
    SolverFailure = 3,
    NotApplicable = 4,
    /// An observation was rejected by the process.
    InvalidObservation = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

/// Opaque wealth process.
pub struct EprocProcess {
    inner: Box<dyn EProcess + Send>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EprocStatus {
    match e {
        Error::SolverFailure { .. } => EprocStatus::SolverFailure,
        Error::NotApplicable(_) => EprocStatus::NotApplicable,
        Error::Io(_) | Error::Csv(_) => EprocStatus::Internal,
        _ => EprocStatus::InvalidArgument,
    }
}

/// Runs `body`, clears the last error on success and records it otherwise.
fn guard(body: impl FnOnce() -> Result<(), (EprocStatus, String)>) -> EprocStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            EprocStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            EprocStatus::Internal
        }
    }
}

fn lib(e: Error) -> (EprocStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_ptr(name: &str) -> (EprocStatus, String) {
    (EprocStatus::NullPointer, format!("{name} is null"))
}

/// # Safety
/// `ptr` must be null or point to `len` readable values.
unsafe fn slice<'a, T>(ptr: *const T, len: usize, name: &str) -> Result<&'a [T], (EprocStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null_ptr(name));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (EprocStatus, String)> {
    if out.is_null() {
        return Err(null_ptr("out"));
    }
    out.write(value);
    Ok(())
}

fn pmf(probs: &[f64]) -> Result<Pmf, (EprocStatus, String)> {
    Pmf::new(probs.to_vec()).map_err(lib)
}

/// Message for the last failed call on this thread, or null after a
/// successful call. The pointer stays valid until the next call.
#[no_mangle]
pub extern "C" fn eproc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a process from a JSON experiment config. `stream_index` selects
/// the random stream used by processes with internal randomness.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eproc_process_new(
    config_json: *const c_char,
    stream_index: u64,
    out: *mut *mut EprocProcess,
) -> EprocStatus {
    guard(|| {
        if config_json.is_null() {
            return Err(null_ptr("config_json"));
        }
        let text = CStr::from_ptr(config_json)
            .to_str()
            .map_err(|e| (EprocStatus::InvalidArgument, format!("config is not UTF-8: {e}")))?;
        let config = ExperimentConfig::from_json(text).map_err(lib)?;
        let inner = config
            .build_process(SeededStream::new(config.master_seed, stream_index))
            .map_err(lib)?;
        write(out, Box::into_raw(Box::new(EprocProcess { inner })))
    })
}

/// Releases a process. Null is ignored.
///
/// # Safety
/// `process` must come from [`eproc_process_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn eproc_process_free(process: *mut EprocProcess) {
    if !process.is_null() {
        drop(Box::from_raw(process));
    }
}

unsafe fn step(process: *mut EprocProcess, x: Observation, log_wealth: *mut f64) -> EprocStatus {
    guard(|| {
        let p = process.as_mut().ok_or_else(|| null_ptr("process"))?;
        let lw = p
            .inner
            .step(x)
            .map_err(|e| (EprocStatus::InvalidObservation, e.to_string()))?;
        if !log_wealth.is_null() {
            log_wealth.write(lw);
        }
        Ok(())
    })
}

/// Feeds one categorical symbol. `log_wealth` may be null.
///
/// # Safety
/// `process` must be a live handle; `log_wealth` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eproc_process_step_symbol(
    process: *mut EprocProcess,
    symbol: usize,
    log_wealth: *mut f64,
) -> EprocStatus {
    step(process, Observation::Symbol(symbol), log_wealth)
}

/// Feeds one observation in `[0, 1]`. `log_wealth` may be null.
///
/// # Safety
/// `process` must be a live handle; `log_wealth` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eproc_process_step_real(
    process: *mut EprocProcess,
    x: f64,
    log_wealth: *mut f64,
) -> EprocStatus {
    step(process, Observation::Real(x), log_wealth)
}

/// Current `log W_n`; may be `+inf`.
///
/// # Safety
/// `process` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eproc_process_log_wealth(process: *const EprocProcess, out: *mut f64) -> EprocStatus {
    guard(|| {
        let p = process.as_ref().ok_or_else(|| null_ptr("process"))?;
        write(out, p.inner.log_wealth())
    })
}

/// Number of observations consumed.
///
/// # Safety
/// `process` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eproc_process_steps(process: *const EprocProcess, out: *mut u64) -> EprocStatus {
    guard(|| {
        let p = process.as_ref().ok_or_else(|| null_ptr("process"))?;
        write(out, p.inner.steps())
    })
}

/// `KL(p || q)` in nats for two pmfs of length `m`.
///
/// # Safety
/// `p` and `q` must point to `m` doubles and `out` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eproc_kl_divergence(p: *const f64, q: *const f64, m: usize, out: *mut f64) -> EprocStatus {
    guard(|| {
        let p = pmf(slice(p, m, "p")?)?;
        let q = pmf(slice(q, m, "q")?)?;
        write(out, kl_divergence(&p, &q).map_err(lib)?)
    })
}

/// `KL_inf` of `p` against the convex hull of `k` vertices, each a pmf of
/// length `m`, stored row-major in `vertices`. `+inf` when no hull point
/// dominates `p`.
///
/// # Safety
/// `vertices` must hold `k * m` doubles, `p` hold `m`, `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn eproc_kl_inf_hull(
    vertices: *const f64,
    k: usize,
    m: usize,
    p: *const f64,
    out: *mut f64,
) -> EprocStatus {
    guard(|| {
        let len = k
            .checked_mul(m)
            .ok_or_else(|| (EprocStatus::InvalidArgument, "k * m overflows".to_string()))?;
        let rows = slice(vertices, len, "vertices")?;
        let hull = ConvexHullNull::new(rows.chunks(m.max(1)).map(pmf).collect::<Result<_, _>>()?).map_err(lib)?;
        let p = pmf(slice(p, m, "p")?)?;
        write(out, hull.kl_inf(&p).map_err(lib)?.gamma_star)
    })
}

/// `KL_inf` of a discrete distribution on `[0, 1]` against the null
/// `{mean = mu0}`.
///
/// # Safety
/// `atoms` and `weights` must hold `len` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn eproc_kl_inf_bounded_mean(
    atoms: *const f64,
    weights: *const f64,
    len: usize,
    mu0: f64,
    out: *mut f64,
) -> EprocStatus {
    guard(|| {
        let dist = BoundedDistSpec::Discrete {
            atoms: slice(atoms, len, "atoms")?.to_vec(),
            weights: slice(weights, len, "weights")?.to_vec(),
        };
        let null = BoundedMeanNull::new(mu0).map_err(lib)?;
        write(out, kl_inf_bounded_mean(&dist, &null, None).map_err(lib)?.gamma_star)
    })
}

/// Lower bound `log(1/alpha) / gamma_star` on the expected stopping time.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eproc_lower_bound(alpha: f64, gamma_star: f64, out: *mut f64) -> EprocStatus {
    guard(|| write(out, eproc::harness::lower_bound_j(alpha, gamma_star).map_err(lib)?))
}

/// Largest root of `y = k + l log y`. Returns `NotApplicable` when the
/// closed-form upper bound does not apply.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eproc_solve_largest_root(k: f64, l: f64, tol: f64, out: *mut f64) -> EprocStatus {
    guard(|| {
        let q = FixedPointQuery::new(k, l).map_err(lib)?;
        write(out, solve_largest_root(&q, tol).map_err(lib)?)
    })
}

/// First 1-based index where `log_wealth` reaches `log(1/alpha)`, or `0`
/// when the path never crosses.
///
/// # Safety
/// `log_wealth` must hold `len` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn eproc_first_crossing(
    log_wealth: *const f64,
    len: usize,
    alpha: f64,
    out: *mut usize,
) -> EprocStatus {
    guard(|| {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err((
                EprocStatus::InvalidArgument,
                format!("alpha must lie in (0, 1], got {alpha}"),
            ));
        }
        let path = slice(log_wealth, len, "log_wealth")?;
        write(out, first_crossing(path, alpha).unwrap_or(0))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        let p = eproc_last_error_message();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn status_codes_map_library_errors() {
        assert_eq!(status_of(&Error::Config("x".into())), EprocStatus::InvalidArgument);
        assert_eq!(status_of(&Error::NotApplicable("x".into())), EprocStatus::NotApplicable);
        assert_eq!(
            status_of(&Error::SolverFailure {
                gap: 1.0,
                tol: 0.1,
                iterations: 1,
                phi: vec![],
                weights: vec![]
            }),
            EprocStatus::SolverFailure
        );
    }

    #[test]
    fn error_message_is_set_and_cleared() {
        let mut out = 0.0;
        let s = unsafe { eproc_lower_bound(2.0, 0.1, &mut out) };
        assert_eq!(s, EprocStatus::InvalidArgument);
        assert!(last_error().contains("alpha"));
        let s = unsafe { eproc_lower_bound(0.01, 0.2, &mut out) };
        assert_eq!(s, EprocStatus::Ok);
        assert!(eproc_last_error_message().is_null());
        assert!((out - 100f64.ln() / 0.2).abs() < 1e-12);
    }

    #[test]
    fn null_out_pointer_is_reported() {
        let s = unsafe { eproc_lower_bound(0.01, 0.2, ptr::null_mut()) };
        assert_eq!(s, EprocStatus::NullPointer);
    }

    #[test]
    fn panics_do_not_cross_the_boundary() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, EprocStatus::Internal);
        assert_eq!(last_error(), "internal panic");
    }
}
