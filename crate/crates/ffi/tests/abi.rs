use std::ffi::CStr;
use std::ptr;

use alpha_lomax::distribution::{sample_inverse, snr_pdf, Channel};
use alpha_lomax::metrics::{ber_exact, Modulation};
use alpha_lomax_ffi::*;

fn handle(a: f64, l: f64, g: f64) -> *mut AlomaxChannel {
    let mut ch = ptr::null_mut();
    assert_eq!(unsafe { alomax_channel_new(a, l, g, &mut ch) }, AlomaxStatus::Ok);
    assert!(!ch.is_null());
    ch
}

fn last_error() -> String {
    let p = alomax_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_functions_match_library() {
    let ch = handle(1.75, 1.25, 10.0);
    let lib = Channel::from_parts(1.75, 1.25, 10.0).unwrap();
    let mut v = 0.0;
    assert_eq!(unsafe { alomax_pdf(ch, 2.0, &mut v) }, AlomaxStatus::Ok);
    assert_eq!(v, snr_pdf(&lib, 2.0).unwrap());
    assert_eq!(unsafe { alomax_ber(ch, 1.0, &mut v) }, AlomaxStatus::Ok);
    assert_eq!(v, ber_exact(&lib, Modulation::Bpsk).unwrap().value);
    assert!((v - 0.009952149595124408).abs() < 1e-12);
    assert_eq!(unsafe { alomax_moment(ch, 1.0, &mut v) }, AlomaxStatus::Ok);
    assert!((v - 10.0).abs() < 1e-11);
    assert_eq!(unsafe { alomax_cdf(ch, 1.0, &mut v) }, AlomaxStatus::Ok);
    assert_eq!(unsafe { alomax_quantile(ch, v, &mut v) }, AlomaxStatus::Ok);
    assert!((v - 1.0).abs() < 1e-12);
    assert_eq!(unsafe { alomax_capacity(ch, &mut v) }, AlomaxStatus::Ok);
    assert!(v > 0.0);
    assert_eq!(unsafe { alomax_bler(ch, 100, 50, &mut v) }, AlomaxStatus::Ok);
    assert!(v > 0.0 && v < 1.0);
    assert_eq!(unsafe { alomax_gmgf(ch, 0.0, 0.0, &mut v) }, AlomaxStatus::DomainError);
    unsafe { alomax_channel_free(ch) };
}

#[test]
fn errors_are_reported() {
    let mut ch = ptr::null_mut();
    assert_eq!(unsafe { alomax_channel_new(0.5, 1.0, 1.0, &mut ch) }, AlomaxStatus::InvalidParameter);
    assert!(ch.is_null());
    assert!(last_error().contains("1/alpha"), "{}", last_error());
    let mut v = 0.0;
    assert_eq!(unsafe { alomax_pdf(ptr::null(), 1.0, &mut v) }, AlomaxStatus::NullPointer);
    let h = handle(2.0, 1.25, 1.0);
    assert_eq!(unsafe { alomax_pdf(h, 1.0, ptr::null_mut()) }, AlomaxStatus::NullPointer);
    assert_eq!(unsafe { alomax_quantile(h, 1.5, &mut v) }, AlomaxStatus::DomainError);
    assert_eq!(unsafe { alomax_moment(h, 10.0, &mut v) }, AlomaxStatus::Divergent);
    unsafe { alomax_channel_free(h) };
    unsafe { alomax_channel_free(ptr::null_mut()) };
}

#[test]
fn sampling_fills_buffer() {
    let h = handle(2.0, 1.25, 1.0);
    let mut buf = vec![0.0; 5000];
    assert_eq!(unsafe { alomax_sample_inverse(h, 3, buf.as_mut_ptr(), buf.len()) }, AlomaxStatus::Ok);
    let lib = sample_inverse(&Channel::from_parts(2.0, 1.25, 1.0).unwrap(), 5000, 3).unwrap();
    assert_eq!(buf, lib.values);
    assert_eq!(unsafe { alomax_sample_physical(h, 3, buf.as_mut_ptr(), buf.len()) }, AlomaxStatus::Ok);
    assert!(buf.iter().all(|v| *v >= 0.0));
    assert_eq!(unsafe { alomax_sample_inverse(h, 3, ptr::null_mut(), 4) }, AlomaxStatus::NullPointer);
    unsafe { alomax_channel_free(h) };
}

#[test]
fn estimate_is_stream_independent() {
    let h = handle(1.0, 2.0, 10.0);
    let cfg = AlomaxMetricConfig { gamma0: 1.0, phi: 1.0, blocklength: 100, info_bits: 50 };
    let mut a = AlomaxEstimate::default();
    let mut b = AlomaxEstimate::default();
    assert_eq!(unsafe { alomax_estimate(h, AlomaxMetric::Outage, &cfg, 5, 200_000, 1, &mut a) }, AlomaxStatus::Ok);
    assert_eq!(unsafe { alomax_estimate(h, AlomaxMetric::Outage, &cfg, 5, 200_000, 8, &mut b) }, AlomaxStatus::Ok);
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.n_used, 200_000);
    assert!((a.mean - 0.1735537190082645).abs() < 4.0 * a.std_error);
    assert_eq!(unsafe { alomax_estimate(h, AlomaxMetric::Bler, &cfg, 5, 10, 1, &mut a) }, AlomaxStatus::InvalidArgument);
    assert_eq!(unsafe { alomax_estimate(h, AlomaxMetric::Ber, ptr::null(), 5, 2000, 1, &mut a) }, AlomaxStatus::NullPointer);
    unsafe { alomax_channel_free(h) };
}
