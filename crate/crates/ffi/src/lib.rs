//! C ABI for the α-Lomax channel library.
//!
//! Every function returns an [`AlomaxStatus`]; results are written through
//! out-pointers. After a non-zero status, [`alomax_last_error`] returns a
//! message for the calling thread. Channels are opaque handles created by
//! [`alomax_channel_new`] and released with [`alomax_channel_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use alpha_lomax::distribution::{self, Channel};
use alpha_lomax::metrics::{self, MetricSpec, Modulation, ShortPacketConfig, Threshold};
use alpha_lomax::montecarlo::{self, McConfig};
use alpha_lomax::Error;

/// Status codes returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlomaxStatus {
    Ok = 0,
    InvalidParameter = 1,
    DomainError = 2,
    InvalidArgument = 3,
    ConvergenceFailure = 4,
    NumericError = 5,
    Divergent = 6,
    ParseError = 7,
    IoError = 8,
    NullPointer = 9,
    Panic = 10,
}

impl From<&Error> for AlomaxStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parameter(_) => Self::InvalidParameter,
            Error::Domain(_) => Self::DomainError,
            Error::Argument(_) => Self::InvalidArgument,
            Error::Convergence { .. } => Self::ConvergenceFailure,
            Error::Numeric(_) => Self::NumericError,
            Error::Divergent(_) => Self::Divergent,
            Error::Parse { .. } => Self::ParseError,
            Error::Io(_) => Self::IoError,
        }
    }
}

/// Metric selector for [`alomax_estimate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlomaxMetric {
    Outage = 0,
    Ber = 1,
    Capacity = 2,
    Bler = 3,
}

/// Auxiliary metric parameters; fields unused by the chosen metric are ignored.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AlomaxMetricConfig {
    /// Outage threshold γ₀ (linear).
    pub gamma0: f64,
    /// Modulation constant φ (1 BPSK, 0.5 BFSK, 0.85 MSK).
    pub phi: f64,
    pub blocklength: u32,
    pub info_bits: u32,
}

/// Monte-Carlo estimate with its 95% interval.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AlomaxEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub n_used: u64,
}

/// Opaque channel handle.
pub struct AlomaxChannel {
    inner: Channel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), AlomaxFailure>) -> AlomaxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AlomaxStatus::Ok,
        Ok(Err(AlomaxFailure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            AlomaxStatus::Panic
        }
    }
}

struct AlomaxFailure(AlomaxStatus, String);

impl From<Error> for AlomaxFailure {
    fn from(e: Error) -> Self {
        AlomaxFailure((&e).into(), e.to_string())
    }
}

fn null(what: &str) -> AlomaxFailure {
    AlomaxFailure(AlomaxStatus::NullPointer, format!("{what} is null"))
}

unsafe fn channel<'a>(ch: *const AlomaxChannel) -> Result<&'a Channel, AlomaxFailure> {
    // SAFETY: the caller passes a handle from alomax_channel_new that has not been freed.
    unsafe { ch.as_ref() }.map(|c| &c.inner).ok_or_else(|| null("channel"))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), AlomaxFailure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: non-null and, by contract, valid for writes.
    unsafe { out.write(v) };
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn alomax_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a channel with shapes α, λ (λ > 1/α) and linear mean SNR γ̄.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn alomax_channel_new(
    alpha: f64,
    lambda: f64,
    mean_snr: f64,
    out: *mut *mut AlomaxChannel,
) -> AlomaxStatus {
    guard(|| {
        let inner = Channel::from_parts(alpha, lambda, mean_snr)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let handle = Box::into_raw(Box::new(AlomaxChannel { inner }));
        unsafe { write(out, handle) }
    })
}

/// Releases a channel. Null is ignored.
///
/// # Safety
/// `ch` must come from [`alomax_channel_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn alomax_channel_free(ch: *mut AlomaxChannel) {
    if !ch.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(ch) });
    }
}

/// Shape parameter ζ of the channel.
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn alomax_channel_zeta(ch: *const AlomaxChannel, out: *mut f64) -> AlomaxStatus {
    guard(|| unsafe { write(out, channel(ch)?.zeta()) })
}

unsafe fn scalar(
    ch: *const AlomaxChannel,
    out: *mut f64,
    f: impl FnOnce(&Channel) -> alpha_lomax::Result<f64>,
) -> AlomaxStatus {
    guard(|| {
        let v = f(unsafe { channel(ch)? })?;
        unsafe { write(out, v) }
    })
}

/// SNR density f_Γ(γ).
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn alomax_pdf(ch: *const AlomaxChannel, gamma: f64, out: *mut f64) -> AlomaxStatus {
    unsafe { scalar(ch, out, |c| distribution::snr_pdf(c, gamma)) }
}

/// SNR CDF F_Γ(γ).
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn alomax_cdf(ch: *const AlomaxChannel, gamma: f64, out: *mut f64) -> AlomaxStatus {
    unsafe { scalar(ch, out, |c| distribution::snr_cdf(c, gamma)) }
}

/// Inverse CDF at probability `u` in [0, 1).
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn alomax_quantile(ch: *const AlomaxChannel, u: f64, out: *mut f64) -> AlomaxStatus {
    unsafe { scalar(ch, out, |c| distribution::snr_quantile(c, u)) }
}

/// Moment `E[Γⁿ]` for real n < αλ.
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn alomax_moment(ch: *const AlomaxChannel, n: f64, out: *mut f64) -> AlomaxStatus {
    unsafe { scalar(ch, out, |c| distribution::moment(c, n)) }
}

/// Generalised MGF E[Γⁿ e^(−sΓ)].
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn alomax_gmgf(ch: *const AlomaxChannel, n: f64, s: f64, out: *mut f64) -> AlomaxStatus {
    unsafe { scalar(ch, out, |c| distribution::gmgf(c, n, s)) }
}

/// Outage probability at threshold γ₀.
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn alomax_outage(ch: *const AlomaxChannel, gamma0: f64, out: *mut f64) -> AlomaxStatus {
    unsafe { scalar(ch, out, |c| metrics::outage_probability(c, Threshold::Snr(gamma0))) }
}

/// Average BER of a coherent binary scheme with constant φ.
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn alomax_ber(ch: *const AlomaxChannel, phi: f64, out: *mut f64) -> AlomaxStatus {
    unsafe { scalar(ch, out, |c| Modulation::custom(phi).and_then(|m| metrics::ber_exact(c, m)).map(|e| e.value)) }
}

/// Ergodic capacity [bit/s/Hz].
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn alomax_capacity(ch: *const AlomaxChannel, out: *mut f64) -> AlomaxStatus {
    unsafe { scalar(ch, out, |c| metrics::capacity_exact(c).map(|e| e.value)) }
}

/// Average short-packet BLER for blocklength N and K information bits.
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn alomax_bler(ch: *const AlomaxChannel, blocklength: u32, info_bits: u32, out: *mut f64) -> AlomaxStatus {
    unsafe { scalar(ch, out, |c| ShortPacketConfig::new(blocklength, info_bits).and_then(|p| metrics::bler_exact(c, &p)).map(|e| e.value)) }
}

unsafe fn fill(buf: *mut f64, len: usize, values: &[f64]) -> Result<(), AlomaxFailure> {
    if buf.is_null() {
        return Err(null("buffer"));
    }
    // SAFETY: the caller guarantees `len` writable doubles at `buf`.
    unsafe { std::slice::from_raw_parts_mut(buf, len) }.copy_from_slice(values);
    Ok(())
}

/// Fills `buf[0..len]` with inverse-CDF SNR draws.
///
/// # Safety
/// `ch` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn alomax_sample_inverse(
    ch: *const AlomaxChannel,
    seed: u64,
    buf: *mut f64,
    len: usize,
) -> AlomaxStatus {
    guard(|| {
        let batch = distribution::sample_inverse(unsafe { channel(ch)? }, len, seed)?;
        unsafe { fill(buf, len, &batch.values) }
    })
}

/// Fills `buf[0..len]` with draws from the physical (Gaussian/Gamma) construction.
///
/// # Safety
/// `ch` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn alomax_sample_physical(
    ch: *const AlomaxChannel,
    seed: u64,
    buf: *mut f64,
    len: usize,
) -> AlomaxStatus {
    guard(|| {
        let batch = distribution::sample_physical(unsafe { channel(ch)? }, len, seed)?;
        unsafe { fill(buf, len, &batch.values) }
    })
}

/// Monte-Carlo estimate of a metric; identical for any `n_streams`.
///
/// # Safety
/// `ch` must be a live handle, `cfg` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn alomax_estimate(
    ch: *const AlomaxChannel,
    metric: AlomaxMetric,
    cfg: *const AlomaxMetricConfig,
    seed: u64,
    n_samples: u64,
    n_streams: u32,
    out: *mut AlomaxEstimate,
) -> AlomaxStatus {
    guard(|| {
        let c = unsafe { channel(ch)? };
        let cfg = unsafe { cfg.as_ref() }.ok_or_else(|| null("metric config"))?;
        let spec = match metric {
            AlomaxMetric::Outage => MetricSpec::Outage { threshold: Threshold::Snr(cfg.gamma0) },
            AlomaxMetric::Ber => MetricSpec::Ber { modulation: Modulation::custom(cfg.phi)? },
            AlomaxMetric::Capacity => MetricSpec::Capacity,
            AlomaxMetric::Bler => MetricSpec::Bler { packet: ShortPacketConfig::new(cfg.blocklength, cfg.info_bits)? },
        };
        let n = usize::try_from(n_samples).map_err(|_| Error::Argument("n_samples too large".into()))?;
        let mc = McConfig::new(seed, n, n_streams as usize)?;
        let e = montecarlo::estimate_metric(&spec, c, &mc)?;
        let v = AlomaxEstimate {
            mean: e.mean,
            std_error: e.std_error,
            ci95_low: e.ci95_low,
            ci95_high: e.ci95_high,
            n_used: e.n_used as u64,
        };
        unsafe { write(out, v) }
    })
}
