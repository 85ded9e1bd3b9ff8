//! Globally adaptive 21-point Gauss–Kronrod quadrature on finite intervals.
//!
//! Generic over the integrand's value type so the Mellin–Barnes evaluator can
//! integrate complex integrands directly.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Values that can be accumulated by the quadrature rule.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

// Kronrod abscissae (descending) and weights; odd indices are the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_207_438,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Absolute and relative targets; the run stops once err ≤ max(abs, rel·|I|).
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_err: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

fn kronrod<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Segment<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[10];
    let mut gauss = T::zero();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kron = kron + (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut resasc = WGK[10] * (fc - mean).magnitude();
    let mut resabs = WGK[10] * fc.magnitude();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
        resabs += WGK[j] * (fv1[j].magnitude() + fv2[j].magnitude());
    }
    let width = half.abs();
    resasc *= width;
    resabs *= width;
    let mut err = ((kron - gauss) * half).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Segment { a, b, value: kron * half, err }
}

/// Integrates `f` over [a, b] with at most `max_segments` bisections.
pub fn integrate<T, F>(f: F, a: f64, b: f64, tol: Tolerance, max_segments: usize) -> QuadResult<T>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    integrate_with_breaks(f, &[a, b], tol, max_segments)
}

/// Integrates over `[breaks[0], breaks[last]]`, starting from the segments
/// delimited by `breaks` (which must be sorted).
pub fn integrate_with_breaks<T, F>(mut f: F, breaks: &[f64], tol: Tolerance, max_segments: usize) -> QuadResult<T>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let mut segments: Vec<Segment<T>> = breaks
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| kronrod(&mut f, w[0], w[1]))
        .collect();
    if segments.is_empty() {
        return QuadResult { value: T::zero(), abs_err: 0.0, evaluations: 0, converged: true };
    }
    let mut evaluations = 21 * segments.len();
    let max_segments = max_segments.max(segments.len());
    loop {
        let total = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
        let err: f64 = segments.iter().map(|s| s.err).sum();
        let target = tol.abs.max(tol.rel * total.magnitude());
        if err <= target || !err.is_finite() && !total.magnitude().is_finite() {
            return QuadResult { value: total, abs_err: err, evaluations, converged: err <= target };
        }
        if segments.len() >= max_segments {
            return QuadResult { value: total, abs_err: err, evaluations, converged: false };
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("non-empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // interval exhausted at double precision
            segments.push(seg);
            let total = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
            let err: f64 = segments.iter().map(|s| s.err).sum();
            return QuadResult { value: total, abs_err: err, evaluations, converged: false };
        }
        segments.push(kronrod(&mut f, seg.a, mid));
        segments.push(kronrod(&mut f, mid, seg.b));
        evaluations += 42;
    }
}
