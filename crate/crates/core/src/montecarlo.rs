//! Seeded Monte-Carlo estimators of the metrics and Kolmogorov–Smirnov checks.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::{block_rng, snr_cdf, snr_quantile, Channel, SampleBatch, SAMPLE_BLOCK};
use crate::error::{Error, Result};
use crate::metrics::{MetricSpec, Modulation};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;
/// Kolmogorov critical coefficient at significance 0.01.
pub const KS_CRITICAL_01: f64 = 1.63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub seed: u64,
    pub n_samples: usize,
    /// Worker threads; does not affect the result.
    pub n_streams: usize,
}

impl McConfig {
    pub fn new(seed: u64, n_samples: usize, n_streams: usize) -> Result<Self> {
        let cfg = Self { seed, n_samples, n_streams };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1000 {
            return Err(Error::Argument(format!("Monte-Carlo needs at least 1000 samples, got {}", self.n_samples)));
        }
        if self.n_streams < 1 {
            return Err(Error::Argument("Monte-Carlo needs at least one stream".into()));
        }
        Ok(())
    }
}

/// Sample mean with its normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub n_used: usize,
}

impl Estimate {
    fn from_moments(m: Moments) -> Self {
        let var = if m.n > 1 { m.m2 / (m.n - 1) as f64 } else { 0.0 };
        let std_error = (var / m.n as f64).sqrt();
        Self {
            mean: m.mean,
            std_error,
            ci95_low: m.mean - Z95 * std_error,
            ci95_high: m.mean + Z95 * std_error,
            n_used: m.n,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci95_low <= value && value <= self.ci95_high
    }
}

/// Running mean and centred second moment (Welford / Chan et al. merge).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        Moments { n, mean, m2 }
    }
}

fn run_blocks<F>(mc: &McConfig, per_block: F) -> Result<Moments>
where
    F: Fn(u64, usize) -> Moments + Sync,
{
    mc.validate()?;
    let blocks = mc.n_samples.div_ceil(SAMPLE_BLOCK);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(mc.n_streams)
        .build()
        .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?;
    let partials: Vec<Moments> = pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let len = SAMPLE_BLOCK.min(mc.n_samples - b * SAMPLE_BLOCK);
                per_block(b as u64, len)
            })
            .collect()
    });
    Ok(partials.into_iter().fold(Moments::default(), Moments::merge))
}

/// Estimates a metric as the sample mean of its per-realisation value over
/// inverse-CDF SNR draws. The draws coincide with
/// [`crate::distribution::sample_inverse`] for the same seed.
pub fn estimate_metric(metric: &MetricSpec, ch: &Channel, mc: &McConfig) -> Result<Estimate> {
    if let MetricSpec::Outage { threshold } = metric {
        threshold.gamma0()?;
    }
    let m = run_blocks(mc, |block, len| {
        let mut rng = block_rng(mc.seed, block);
        let mut acc = Moments::default();
        for _ in 0..len {
            let u: f64 = rng.random();
            let snr = snr_quantile(ch, u).unwrap_or(0.0);
            acc.push(metric.conditional(snr));
        }
        acc
    })?;
    Ok(Estimate::from_moments(m))
}

/// Bit-by-bit BER estimate: one antipodal symbol per channel draw, error when
/// the Gaussian noise exceeds √(2φγ).
pub fn estimate_ber_bitwise(ch: &Channel, modulation: Modulation, mc: &McConfig) -> Result<Estimate> {
    let phi = modulation.phi();
    let m = run_blocks(mc, |block, len| {
        let mut rng = block_rng(mc.seed, block);
        let mut acc = Moments::default();
        for _ in 0..len {
            let u: f64 = rng.random();
            let snr = snr_quantile(ch, u).unwrap_or(0.0);
            let noise: f64 = rng.sample(StandardNormal);
            acc.push(if noise > (2.0 * phi * snr).sqrt() { 1.0 } else { 0.0 });
        }
        acc
    })?;
    Ok(Estimate::from_moments(m))
}

/// Result of a Kolmogorov–Smirnov test at significance 0.01.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub critical: f64,
    pub pass_at_01: bool,
}

/// One-sample KS distance of the batch against the channel's SNR CDF.
pub fn ks_test(batch: &SampleBatch, ch: &Channel) -> Result<KsOutcome> {
    ks_against(&batch.values, |x| snr_cdf(ch, x.max(0.0)).unwrap_or(0.0))
}

/// One-sample KS distance against an arbitrary CDF.
pub fn ks_against(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsOutcome> {
    if values.is_empty() {
        return Err(Error::Argument("KS test needs a non-empty sample".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max);
    let critical = KS_CRITICAL_01 / n.sqrt();
    Ok(KsOutcome { statistic, critical, pass_at_01: statistic < critical })
}

/// Two-sample KS test with critical value 1.63 √((n+m)/(nm)).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsOutcome> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Argument("two-sample KS test needs non-empty samples".into()));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut statistic: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        statistic = statistic.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let (nf, mf) = (n as f64, m as f64);
    let critical = KS_CRITICAL_01 * ((nf + mf) / (nf * mf)).sqrt();
    Ok(KsOutcome { statistic, critical, pass_at_01: statistic < critical })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{sample_inverse, snr_quantile, SamplingMethod};
    use crate::metrics::{outage_probability, Threshold};

    fn ch(a: f64, l: f64, g: f64) -> Channel {
        Channel::from_parts(a, l, g).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(1, 999, 1).is_err());
        assert!(McConfig::new(1, 1000, 0).is_err());
        assert!(McConfig::new(1, 1000, 1).is_ok());
    }

    #[test]
    fn outage_estimate_brackets_closed_form() {
        let c = ch(1.0, 2.0, 10.0);
        let spec = MetricSpec::Outage { threshold: Threshold::Snr(1.0) };
        let e = estimate_metric(&spec, &c, &McConfig::new(7, 1_000_000, 4).unwrap()).unwrap();
        let exact = outage_probability(&c, Threshold::Snr(1.0)).unwrap();
        assert!((e.mean - exact).abs() < 4.0 * e.std_error, "{e:?} vs {exact}");
        assert!((e.ci95_high - e.mean - Z95 * e.std_error).abs() < 1e-15);
        assert_eq!(e.n_used, 1_000_000);
    }

    #[test]
    fn degenerate_indicator_has_zero_error() {
        let c = ch(1.0, 2.0, 1e300);
        let spec = MetricSpec::Outage { threshold: Threshold::Snr(1e-300) };
        let e = estimate_metric(&spec, &c, &McConfig::new(3, 5000, 2).unwrap()).unwrap();
        assert_eq!(e.mean, 0.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn capacity_low_snr_limit() {
        let e = estimate_metric(&MetricSpec::Capacity, &ch(2.0, 1.5, 1e-9), &McConfig::new(1, 10_000, 1).unwrap())
            .unwrap();
        assert!(e.mean >= 0.0 && e.mean < 1e-8);
    }

    #[test]
    fn bit_identical_across_stream_counts() {
        let c = ch(1.75, 1.25, 10.0);
        let spec = MetricSpec::Ber { modulation: Modulation::Bpsk };
        let n = 5 * SAMPLE_BLOCK + 123;
        let base = estimate_metric(&spec, &c, &McConfig::new(11, n, 1).unwrap()).unwrap();
        for streams in [4, 16] {
            let e = estimate_metric(&spec, &c, &McConfig::new(11, n, streams).unwrap()).unwrap();
            assert_eq!(e.mean.to_bits(), base.mean.to_bits());
            assert_eq!(e.std_error.to_bits(), base.std_error.to_bits());
        }
    }

    #[test]
    fn semi_analytic_beats_bitwise_variance() {
        let c = ch(1.75, 1.25, 3.0);
        let mc = McConfig::new(5, 200_000, 4).unwrap();
        let semi = estimate_metric(&MetricSpec::Ber { modulation: Modulation::Bpsk }, &c, &mc).unwrap();
        let bits = estimate_ber_bitwise(&c, Modulation::Bpsk, &mc).unwrap();
        assert!(semi.std_error < bits.std_error);
        assert!((semi.mean - bits.mean).abs() < 4.0 * bits.std_error);
    }

    #[test]
    fn ks_single_element_at_median() {
        let c = ch(2.0, 1.25, 1.0);
        let median = snr_quantile(&c, 0.5).unwrap();
        let batch = SampleBatch { values: vec![median], seed: 0, method: SamplingMethod::InverseCdf };
        let r = ks_test(&batch, &c).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-12);
        let empty = SampleBatch { values: vec![], seed: 0, method: SamplingMethod::InverseCdf };
        assert!(ks_test(&empty, &c).is_err());
    }

    #[test]
    fn ks_detects_mismatch() {
        let c = ch(1.5, 1.25, 1.0);
        let batch = sample_inverse(&c, 100_000, 3).unwrap();
        assert!(ks_test(&batch, &c).unwrap().pass_at_01);
        assert!(!ks_test(&batch, &ch(3.0, 1.25, 1.0)).unwrap().pass_at_01);
    }

    #[test]
    fn two_sample_ks_geometry() {
        let r = ks_two_sample(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        let r = ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(ks_two_sample(&[], &[1.0]).is_err());
    }
}
