//! C interface to `qcap`.
//!
//! Every function returns a [`QcapStatus`]; on failure the message is
//! available from [`qcap_last_error`] on the same thread until the next
//! call. Objects are handed out as opaque pointers and must be released
//! with the matching `*_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qcap::capacity::{ce_maximize_with, CeOptions};
use qcap::channels::ChannelSpec;
use qcap::gaussian::{ce_over_cshan_limit, gaussian_ce, GaussianParams};
use qcap::qmath::QuantumChannel;
use qcap::reverse_shannon::{ba_capacity, exact_faithfulness_oracle, Dmc, ProtocolConfig, SimChannel, Variant};
use qcap::typeclasses::spectrum_report;
use qcap::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    InvalidState = 4,
    NotComplete = 5,
    NonConvergence = 6,
    Cancelled = 7,
    Infeasible = 8,
    LimitExceeded = 9,
    Parse = 10,
    Io = 11,
    Panic = 12,
}

/// Opaque quantum channel.
pub struct QcapChannel {
    inner: QuantumChannel,
}

/// Opaque discrete memoryless channel.
pub struct QcapDmc {
    inner: Dmc,
}

/// Outcome of [`qcap_ce_maximize`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QcapCeResult {
    pub value: f64,
    pub gap_bound: f64,
    pub iterations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QcapStatus {
    match e {
        Error::InvalidState(_) => QcapStatus::InvalidState,
        Error::DimensionMismatch(_) => QcapStatus::DimensionMismatch,
        Error::InvalidParameter(_) => QcapStatus::InvalidArgument,
        Error::NotComplete { .. } => QcapStatus::NotComplete,
        Error::NonConvergence { .. } => QcapStatus::NonConvergence,
        Error::Cancelled { .. } => QcapStatus::Cancelled,
        Error::Infeasible(_) => QcapStatus::Infeasible,
        Error::LimitExceeded(_) => QcapStatus::LimitExceeded,
        Error::Parse(_) | Error::Json(_) => QcapStatus::Parse,
        Error::Io(_) => QcapStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QcapStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QcapStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            QcapStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            QcapStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Lib(Error::Parse(format!("{what} is not UTF-8"))))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next `qcap_*` call on the same thread.
#[no_mangle]
pub extern "C" fn qcap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qcap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build a channel from a preset such as `"amplitude-damping:0.5"`.
///
/// # Safety
/// `preset` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcap_channel_from_preset(preset: *const c_char, out: *mut *mut QcapChannel) -> QcapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let ch = ChannelSpec::from_preset(str_arg(preset, "preset")?)?.build()?;
        *out = Box::into_raw(Box::new(QcapChannel { inner: ch }));
        Ok(())
    })
}

/// Build a channel from ChannelSpec JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcap_channel_from_json(json: *const c_char, out: *mut *mut QcapChannel) -> QcapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let spec: ChannelSpec = serde_json::from_str(str_arg(json, "json")?).map_err(Error::from)?;
        *out = Box::into_raw(Box::new(QcapChannel { inner: spec.build()? }));
        Ok(())
    })
}

/// # Safety
/// `ch` must come from a `qcap_channel_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qcap_channel_free(ch: *mut QcapChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// # Safety
/// `ch` must be a live channel; `d_in` and `d_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcap_channel_dims(ch: *const QcapChannel, d_in: *mut usize, d_out: *mut usize) -> QcapStatus {
    guard(|| {
        let ch = ch.as_ref().ok_or(Fail::Null("ch"))?;
        *out_arg(d_in, "d_in")? = ch.inner.d_in();
        *out_arg(d_out, "d_out")? = ch.inner.d_out();
        Ok(())
    })
}

/// Entanglement-assisted capacity in bits. On non-convergence the best
/// iterate is still written to `out`.
///
/// # Safety
/// `ch` must be a live channel; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcap_ce_maximize(ch: *const QcapChannel, tol: f64, out: *mut QcapCeResult) -> QcapStatus {
    guard(|| {
        let ch = ch.as_ref().ok_or(Fail::Null("ch"))?;
        let out = out_arg(out, "out")?;
        let write = |out: &mut QcapCeResult, r: &qcap::capacity::CeResult| {
            *out = QcapCeResult { value: r.value, gap_bound: r.gap_bound, iterations: r.iterations };
        };
        match ce_maximize_with(&ch.inner, &CeOptions::with_tol(tol), None) {
            Ok(r) => {
                write(out, &r);
                Ok(())
            }
            Err(Error::NonConvergence { best }) => {
                write(out, &best);
                Err(Error::NonConvergence { best }.into())
            }
            Err(e) => Err(e.into()),
        }
    })
}

/// Closed-form entanglement-assisted capacity of the bosonic Gaussian channel.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcap_gaussian_ce(s: f64, n: f64, k: f64, out: *mut f64) -> QcapStatus {
    guard(|| {
        *out_arg(out, "out")? = gaussian_ce(&GaussianParams::new(s, n, k)?)?;
        Ok(())
    })
}

/// Large-noise limit of the assisted-to-unassisted capacity ratio.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcap_ce_over_cshan_limit(s: f64, out: *mut f64) -> QcapStatus {
    guard(|| {
        *out_arg(out, "out")? = ce_over_cshan_limit(s)?;
        Ok(())
    })
}

/// DMC from a row-major `d_in x d_out` table of `P(y|x)`.
///
/// # Safety
/// `matrix` must point to `d_in * d_out` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcap_dmc_new(matrix: *const f64, d_in: usize, d_out: usize, out: *mut *mut QcapDmc) -> QcapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let len = d_in
            .checked_mul(d_out)
            .ok_or_else(|| Error::InvalidParameter("table size overflows".into()))?;
        let data = slice_arg(matrix, len, "matrix")?;
        if len == 0 {
            return Err(Error::InvalidParameter("empty table".into()).into());
        }
        let rows = data.chunks(d_out).map(<[f64]>::to_vec).collect();
        *out = Box::into_raw(Box::new(QcapDmc { inner: Dmc::new(rows)? }));
        Ok(())
    })
}

/// # Safety
/// `dmc` must come from [`qcap_dmc_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qcap_dmc_free(dmc: *mut QcapDmc) {
    if !dmc.is_null() {
        drop(Box::from_raw(dmc));
    }
}

/// Shannon capacity in bits; `q_out`, if not NULL, receives the
/// `d_in` entries of the optimal input distribution.
///
/// # Safety
/// `dmc` must be live; `capacity` writable; `q_out` NULL or `d_in` doubles.
#[no_mangle]
pub unsafe extern "C" fn qcap_dmc_capacity(dmc: *const QcapDmc, tol: f64, capacity: *mut f64, q_out: *mut f64) -> QcapStatus {
    guard(|| {
        let dmc = dmc.as_ref().ok_or(Fail::Null("dmc"))?;
        let cap = out_arg(capacity, "capacity")?;
        let (c, q) = ba_capacity(&dmc.inner, tol)?;
        *cap = c;
        if !q_out.is_null() {
            std::slice::from_raw_parts_mut(q_out, q.len()).copy_from_slice(&q);
        }
        Ok(())
    })
}

/// Exhaustive faithfulness check of the simulation protocol; writes the
/// largest deviation from the simulated channel. `dmc` NULL selects the
/// BSC variant with crossover `p`, otherwise the general variant on `dmc`.
///
/// # Safety
/// `dmc` NULL or live; `deviation` writable.
#[no_mangle]
pub unsafe extern "C" fn qcap_rst_verify_exact(
    dmc: *const QcapDmc,
    p: f64,
    n: usize,
    z_size: u64,
    deviation: *mut f64,
) -> QcapStatus {
    guard(|| {
        let dev = out_arg(deviation, "deviation")?;
        let (ch, variant) = match dmc.as_ref() {
            Some(d) => (SimChannel::Dmc(d.inner.clone()), Variant::General),
            None => (SimChannel::Bsc(p), Variant::Bsc),
        };
        let cfg = ProtocolConfig::new(n, 0.5, variant)?.with_z_size(z_size);
        cfg.validate()?;
        *dev = exact_faithfulness_oracle(&ch, &cfg)?.deviation;
        Ok(())
    })
}

/// Typical-subspace properties for a state with eigenvalues `probs`.
/// `ok` receives three flags (0/1); `trace_mass` the exact projected mass.
///
/// # Safety
/// `probs` points to `d` doubles; `ok` to 3 bytes; `trace_mass` writable.
#[no_mangle]
pub unsafe extern "C" fn qcap_typical_check(
    probs: *const f64,
    d: usize,
    n: usize,
    delta: f64,
    epsilon: f64,
    ok: *mut u8,
    trace_mass: *mut f64,
) -> QcapStatus {
    guard(|| {
        let eigs = slice_arg(probs, d, "probs")?;
        if ok.is_null() {
            return Err(Fail::Null("ok"));
        }
        let mass = out_arg(trace_mass, "trace_mass")?;
        let r = spectrum_report(eigs, n, delta, epsilon)?;
        let flags = std::slice::from_raw_parts_mut(ok, 3);
        for (f, &b) in flags.iter_mut().zip(&r.bounds_ok) {
            *f = u8::from(b);
        }
        *mass = r.trace_mass;
        Ok(())
    })
}
