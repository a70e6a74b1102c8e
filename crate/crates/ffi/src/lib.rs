//! C interface to `conical-harvest`.
//!
//! Every fallible call returns a [`ChStatus`] and writes results through out
//! pointers. On failure a description is kept per thread and can be read with
//! [`ch_last_error`]. Configurations and sweeps are opaque handles released
//! with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use conical_harvest::entanglement::{self, Axis, DmaxScan, Spacing, SweepRow, SweepSpec};
use conical_harvest::geometry::{Alignment, ConeParameter, PairConfig};
use conical_harvest::response;
use conical_harvest::special::{self, Complex};
use conical_harvest::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    DivergentOverlap = 3,
    ToleranceNotMet = 4,
    NoSignChange = 5,
    NotUnimodal = 6,
    NumericalFailure = 7,
    OutOfRange = 8,
    Panic = 9,
}

/// Values accepted wherever an alignment is passed as `uint32_t`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChAlignment {
    Flat = 0,
    Parallel = 1,
    Orthogonal = 2,
    Opposite = 3,
    BoundaryParallel = 4,
    BoundaryOrthogonal = 5,
}

/// Values accepted wherever a sweep axis is passed as `uint32_t`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChAxis {
    L = 0,
    D = 1,
    Nu = 2,
    Gap = 3,
}

/// Observables per λ².
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChConcurrence {
    pub p_a: f64,
    pub p_b: f64,
    pub abs_x: f64,
    pub concurrence: f64,
}

/// One sweep point. Observables are NaN when `computed` is 0.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChSweepRow {
    pub param: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub abs_x: f64,
    pub concurrence: f64,
    pub computed: u8,
    pub diverged: u8,
}

/// A validated detector pair and cone parameter.
pub struct ChPair {
    config: PairConfig,
    nu: ConeParameter,
}

/// Rows of a finished sweep.
pub struct ChSweep {
    rows: Vec<SweepRow>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> ChStatus {
    match e {
        Error::InvalidParameter(_) => ChStatus::InvalidParameter,
        Error::DivergentOverlap { .. } | Error::DivergentArgument { .. } => ChStatus::DivergentOverlap,
        Error::ToleranceNotMet { .. } => ChStatus::ToleranceNotMet,
        Error::NoSignChange { .. } => ChStatus::NoSignChange,
        Error::NotUnimodal { .. } => ChStatus::NotUnimodal,
        Error::OverflowDomain { .. } | Error::PolesTooClose { .. } => ChStatus::NumericalFailure,
    }
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), ChStatus>) -> ChStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ChStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            ChStatus::Panic
        }
    }
}

fn fail(e: Error) -> ChStatus {
    set_error(format!("{}: {e}", e.kind()));
    status_of(&e)
}

fn null(name: &str) -> ChStatus {
    set_error(format!("null pointer: {name}"));
    ChStatus::NullPointer
}

fn alignment(code: u32) -> Result<Alignment, ChStatus> {
    Ok(match code {
        0 => Alignment::Flat,
        1 => Alignment::ParallelSameSide,
        2 => Alignment::OrthogonalSameSide,
        3 => Alignment::OrthogonalOppositeSides,
        4 => Alignment::BoundaryParallel,
        5 => Alignment::BoundaryOrthogonal,
        other => {
            set_error(format!("unknown alignment code {other}"));
            return Err(ChStatus::InvalidParameter);
        }
    })
}

fn axis(code: u32) -> Result<Axis, ChStatus> {
    Ok(match code {
        0 => Axis::L,
        1 => Axis::D,
        2 => Axis::Nu,
        3 => Axis::Gap,
        other => {
            set_error(format!("unknown axis code {other}"));
            return Err(ChStatus::InvalidParameter);
        }
    })
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), ChStatus> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ch_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ch_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Faddeeva function w(z).
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ch_faddeeva(re: f64, im: f64, out_re: *mut f64, out_im: *mut f64) -> ChStatus {
    guard(|| {
        if !(re.is_finite() && im.is_finite()) {
            set_error("non-finite argument");
            return Err(ChStatus::InvalidParameter);
        }
        let w = special::faddeeva_w(Complex::new(re, im));
        write(out_re, w.re, "out_re")?;
        write(out_im, w.im, "out_im")
    })
}

/// Flat-spacetime transition probability per λ² for gap Ωσ. NaN for a
/// negative or non-finite gap.
#[no_mangle]
pub extern "C" fn ch_p_flat(gap: f64) -> f64 {
    if !(gap.is_finite() && gap >= 0.0) {
        return f64::NAN;
    }
    response::p_flat(gap)
}

/// Transition probability per λ² at distance `rho` from the string.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ch_p_string(rho: f64, nu: f64, gap: f64, out: *mut f64) -> ChStatus {
    guard(|| {
        let nu = ConeParameter::new(nu).map_err(fail)?;
        if !(rho.is_finite() && rho >= 0.0 && gap.is_finite() && gap >= 0.0) {
            return Err(fail(Error::InvalidParameter(format!("rho = {rho}, gap = {gap}"))));
        }
        let r = response::p_string(rho, nu, gap).map_err(fail)?;
        write(out, r.total, "out")
    })
}

/// Validates a configuration and returns a new handle in `*out`.
///
/// # Safety
/// `out` must be valid for writes. The handle must be released with
/// [`ch_pair_free`].
#[no_mangle]
pub unsafe extern "C" fn ch_pair_new(
    alignment_code: u32,
    nu: f64,
    l: f64,
    d: f64,
    gap: f64,
    out: *mut *mut ChPair,
) -> ChStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = PairConfig::new(alignment(alignment_code)?, l, d, gap).map_err(fail)?;
        let nu = ConeParameter::new(nu).map_err(fail)?;
        out.write(Box::into_raw(Box::new(ChPair { config, nu })));
        Ok(())
    })
}

/// # Safety
/// `pair` must come from [`ch_pair_new`] and not be used afterwards. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn ch_pair_free(pair: *mut ChPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// # Safety
/// `pair` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ch_pair_concurrence(pair: *const ChPair, out: *mut ChConcurrence) -> ChStatus {
    guard(|| {
        let pair = pair.as_ref().ok_or_else(|| null("pair"))?;
        let r = entanglement::concurrence(&pair.config, pair.nu).map_err(fail)?;
        let value = ChConcurrence {
            p_a: r.p_a,
            p_b: r.p_b,
            abs_x: r.abs_x,
            concurrence: r.concurrence,
        };
        write(out, value, "out")
    })
}

/// Largest harvesting separation for the pair's alignment, ν, l and gap.
/// `*found` is 0 when no separation in `(0, d_hi]` harvests; `*d_max` is
/// then NaN.
///
/// # Safety
/// `pair` must be a live handle; `d_max` and `found` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ch_pair_d_max(
    pair: *const ChPair,
    d_hi: f64,
    grid_n: usize,
    d_max: *mut f64,
    found: *mut u8,
) -> ChStatus {
    guard(|| {
        let pair = pair.as_ref().ok_or_else(|| null("pair"))?;
        let scan = DmaxScan {
            d_hi,
            grid_n,
            ..DmaxScan::default()
        };
        let c = pair.config;
        let r = entanglement::d_max(c.alignment, pair.nu, c.l, c.gap, &scan).map_err(fail)?;
        write(d_max, r.d_max.unwrap_or(f64::NAN), "d_max")?;
        write(found, r.d_max.is_some() as u8, "found")
    })
}

/// Runs a linear sweep along `axis_code` over `[lo, hi]` with `n` points,
/// holding the other parameters fixed.
///
/// # Safety
/// `out` must be valid for writes; release the handle with [`ch_sweep_free`].
#[no_mangle]
pub unsafe extern "C" fn ch_sweep_new(
    alignment_code: u32,
    axis_code: u32,
    lo: f64,
    hi: f64,
    n: usize,
    nu: f64,
    l: f64,
    d: f64,
    gap: f64,
    out: *mut *mut ChSweep,
) -> ChStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = SweepSpec {
            axis: axis(axis_code)?,
            lo,
            hi,
            n,
            spacing: Spacing::Linear,
            alignments: vec![alignment(alignment_code)?],
            nu,
            l,
            d,
            gap,
            d_over_l: None,
        };
        let table = entanglement::sweep(&spec).map_err(fail)?;
        out.write(Box::into_raw(Box::new(ChSweep { rows: table.rows })));
        Ok(())
    })
}

/// Number of rows; 0 for NULL.
///
/// # Safety
/// `sweep` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ch_sweep_len(sweep: *const ChSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.rows.len())
}

/// # Safety
/// `sweep` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ch_sweep_row(sweep: *const ChSweep, index: usize, out: *mut ChSweepRow) -> ChStatus {
    guard(|| {
        let sweep = sweep.as_ref().ok_or_else(|| null("sweep"))?;
        let row = sweep.rows.get(index).ok_or_else(|| {
            set_error(format!("row {index} out of range (len {})", sweep.rows.len()));
            ChStatus::OutOfRange
        })?;
        let v = |x: Option<f64>| x.unwrap_or(f64::NAN);
        let value = ChSweepRow {
            param: row.param,
            p_a: v(row.p_a),
            p_b: v(row.p_b),
            abs_x: v(row.abs_x),
            concurrence: v(row.concurrence),
            computed: row.concurrence.is_some() as u8,
            diverged: row.diverged as u8,
        };
        write(out, value, "out")
    })
}

/// # Safety
/// `sweep` must come from [`ch_sweep_new`] and not be used afterwards. NULL
/// is ignored.
#[no_mangle]
pub unsafe extern "C" fn ch_sweep_free(sweep: *mut ChSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

/// Copies the last error message into `buf` (NUL-terminated, truncated to
/// `len`). Returns the full message length, 0 when there is none.
///
/// # Safety
/// `buf` must be valid for `len` bytes, or NULL with `len` 0.
#[no_mangle]
pub unsafe extern "C" fn ch_last_error_copy(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_deref().map(CStr::to_bytes) else {
            return 0;
        };
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast(), buf, n);
            buf.add(n).write(0);
        }
        msg.len()
    })
}
