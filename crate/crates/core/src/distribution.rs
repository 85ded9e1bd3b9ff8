//! The α-Lomax SNR distribution and its samplers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{beta, fox_h, gamma, ln_gamma, ContourConfig, FoxHParams};

/// Shape pair (α, λ) with the derived scale ζ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaLomaxParams {
    alpha: f64,
    lambda: f64,
    zeta: f64,
}

impl AlphaLomaxParams {
    /// Validates α > 0 and λ > 1/α and computes
    /// ζ = (Γ(1+1/α) Γ(λ−1/α) / Γ(λ))^α.
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Parameter(format!("alpha must be > 0, got {alpha}")));
        }
        if !(lambda > 1.0 / alpha) || !lambda.is_finite() {
            return Err(Error::Parameter(format!(
                "lambda must exceed 1/alpha = {}, got lambda = {lambda}",
                1.0 / alpha
            )));
        }
        let inv = 1.0 / alpha;
        let ln_ratio = ln_gamma(1.0 + inv)? + ln_gamma(lambda - inv)? - ln_gamma(lambda)?;
        let zeta = (alpha * ln_ratio).exp();
        Ok(Self { alpha, lambda, zeta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }
}

impl<'de> Deserialize<'de> for AlphaLomaxParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            alpha: f64,
            lambda: f64,
        }
        let raw = Raw::deserialize(d)?;
        AlphaLomaxParams::new(raw.alpha, raw.lambda).map_err(serde::de::Error::custom)
    }
}

/// Model parameters plus the mean SNR γ̄ (linear scale).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub params: AlphaLomaxParams,
    mean_snr: f64,
}

impl Channel {
    pub fn new(params: AlphaLomaxParams, mean_snr: f64) -> Result<Self> {
        if !(mean_snr > 0.0) || !mean_snr.is_finite() {
            return Err(Error::Parameter(format!("mean SNR must be positive and finite, got {mean_snr}")));
        }
        Ok(Self { params, mean_snr })
    }

    /// Shorthand for `Channel::new(AlphaLomaxParams::new(alpha, lambda)?, mean_snr)`.
    pub fn from_parts(alpha: f64, lambda: f64, mean_snr: f64) -> Result<Self> {
        Self::new(AlphaLomaxParams::new(alpha, lambda)?, mean_snr)
    }

    pub fn mean_snr(&self) -> f64 {
        self.mean_snr
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda
    }

    pub fn zeta(&self) -> f64 {
        self.params.zeta
    }

    /// k = ζ / γ̄^α, the coefficient of γ^α inside the CDF.
    pub(crate) fn k(&self) -> f64 {
        self.params.zeta * self.mean_snr.powf(-self.params.alpha)
    }

    /// ln(kγ^α) without overflow.
    fn ln_kx(&self, gamma: f64) -> f64 {
        self.k().ln() + self.params.alpha * gamma.ln()
    }

    /// Interior mode of the SNR density; `None` for α ≤ 1 (decreasing density).
    pub fn mode(&self) -> Option<f64> {
        let (a, l) = (self.params.alpha, self.params.lambda);
        (a > 1.0).then(|| self.mean_snr * self.params.zeta.powf(-1.0 / a) * ((a - 1.0) / (a * l + 1.0)).powf(1.0 / a))
    }
}

fn ln1p_exp(t: f64) -> f64 {
    if t > 36.0 {
        t
    } else {
        t.exp().ln_1p()
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) {
        return Err(Error::Domain(format!("SNR must be non-negative, got {gamma}")));
    }
    Ok(())
}

/// Density of the instantaneous SNR.
///
/// At γ = 0 the density is 0 for α > 1, λζ/γ̄ for α = 1 and `f64::INFINITY`
/// for α < 1 (integrable singularity).
pub fn snr_pdf(ch: &Channel, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let (a, l) = (ch.params.alpha, ch.params.lambda);
    if gamma == 0.0 {
        return Ok(if a > 1.0 {
            0.0
        } else if a == 1.0 {
            l * ch.k()
        } else {
            f64::INFINITY
        });
    }
    if gamma.is_infinite() {
        return Ok(0.0);
    }
    let ln_f = (a * l * ch.k()).ln() + (a - 1.0) * gamma.ln() - (l + 1.0) * ln1p_exp(ch.ln_kx(gamma));
    Ok(ln_f.exp())
}

/// CDF of the instantaneous SNR, 1 − (1 + ζγ^α/γ̄^α)^(−λ).
pub fn snr_cdf(ch: &Channel, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    Ok(-(-ch.params.lambda * ln1p_exp(ch.ln_kx(gamma))).exp_m1())
}

/// Survival function 1 − F(γ), accurate in the upper tail.
pub fn snr_sf(ch: &Channel, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if gamma == 0.0 {
        return Ok(1.0);
    }
    Ok((-ch.params.lambda * ln1p_exp(ch.ln_kx(gamma))).exp())
}

/// Inverse CDF: γ̄ ζ^(−1/α) ((1−u)^(−1/λ) − 1)^(1/α).
pub fn snr_quantile(ch: &Channel, u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::Domain(format!("quantile level must lie in [0, 1), got {u}")));
    }
    Ok(quantile_unchecked(ch, u))
}

fn quantile_unchecked(ch: &Channel, u: f64) -> f64 {
    let (a, l) = (ch.params.alpha, ch.params.lambda);
    let inner = (-(-u).ln_1p() / l).exp_m1();
    ch.mean_snr * (inner / ch.params.zeta).powf(1.0 / a)
}

/// `E[Γⁿ]` = γ̄ⁿ λ ζ^(−n/α) B(1 + n/α, λ − n/α) for 0 ≤ n < αλ.
pub fn moment(ch: &Channel, n: f64) -> Result<f64> {
    let (a, l) = (ch.params.alpha, ch.params.lambda);
    if !(n >= 0.0) {
        return Err(Error::Domain(format!("moment order must be non-negative, got {n}")));
    }
    if n >= a * l {
        return Err(Error::Divergent(format!("moment of order {n} diverges (needs n < alpha*lambda = {})", a * l)));
    }
    Ok(ch.mean_snr.powf(n) * l * ch.params.zeta.powf(-n / a) * beta(1.0 + n / a, l - n / a)?)
}

/// Generalized MGF E[Γⁿ e^(−sΓ)] through its H-function representation.
pub fn gmgf(ch: &Channel, n: f64, s: f64) -> Result<f64> {
    gmgf_with(ch, n, s, &ContourConfig::default())
}

pub fn gmgf_with(ch: &Channel, n: f64, s: f64, cfg: &ContourConfig) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("MGF argument s must be positive, got {s}")));
    }
    if !(n >= 0.0) {
        return Err(Error::Domain(format!("MGF order n must be non-negative, got {n}")));
    }
    let (a, l) = (ch.params.alpha, ch.params.lambda);
    let h = FoxHParams::new(1, 2, 2, 1, vec![(1.0 - l, 1.0), (1.0 - n, a)], vec![(1.0, 1.0)])?;
    let arg = ch.params.zeta / (ch.mean_snr * s).powf(a);
    Ok(a / (s.powf(n) * gamma(l)?) * fox_h(&h, arg, cfg)?)
}

/// How a batch was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMethod {
    /// Gamma-mixed complex Gaussian, modulus raised to 1/α, normalised by Ω.
    Physical,
    /// Inverse-transform sampling of the CDF.
    InverseCdf,
}

/// Instantaneous SNR draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub seed: u64,
    pub method: SamplingMethod,
}

/// Draws are generated in blocks of this many samples; block `i` uses the
/// ChaCha stream `i` of the seed, so the batch does not depend on how blocks
/// are scheduled across threads.
pub const SAMPLE_BLOCK: usize = 1 << 14;

pub(crate) fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn generate<F>(count: usize, seed: u64, fill: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    if count < 1 {
        return Err(Error::Argument("sample count must be at least 1".into()));
    }
    let mut values = vec![0.0; count];
    values.par_chunks_mut(SAMPLE_BLOCK).enumerate().for_each(|(block, chunk)| {
        let mut rng = block_rng(seed, block as u64);
        fill(&mut rng, chunk);
    });
    Ok(values)
}

/// Physical construction: τ ~ Gamma(λ, rate 1), X, Y ~ N(0, 1/(2τ)),
/// P = X² + Y², H = P^(1/α), Γ = γ̄ H/Ω.
pub fn sample_physical(ch: &Channel, count: usize, seed: u64) -> Result<SampleBatch> {
    sample_physical_with_rate(ch, count, seed, 1.0)
}

/// [`sample_physical`] with the Gamma rate β exposed; the output distribution
/// does not depend on β.
#[doc(hidden)]
pub fn sample_physical_with_rate(ch: &Channel, count: usize, seed: u64, rate: f64) -> Result<SampleBatch> {
    if !(rate > 0.0) {
        return Err(Error::Parameter(format!("gamma rate must be positive, got {rate}")));
    }
    let (a, l) = (ch.params.alpha, ch.params.lambda);
    let inv = 1.0 / a;
    // Ω = E[H] = β^(1/α) Γ(1+1/α) Γ(λ−1/α) / Γ(λ)
    let omega = (inv * rate.ln() + ln_gamma(1.0 + inv)? + ln_gamma(l - inv)? - ln_gamma(l)?).exp();
    let mixing = Gamma::new(l, 1.0 / rate).map_err(|e| Error::Parameter(e.to_string()))?;
    let scale = ch.mean_snr / omega;
    let values = generate(count, seed, |rng, out| {
        for v in out.iter_mut() {
            let tau: f64 = mixing.sample(rng);
            let sd = (0.5 / tau).sqrt();
            let x: f64 = sd * rng.sample::<f64, _>(StandardNormal);
            let y: f64 = sd * rng.sample::<f64, _>(StandardNormal);
            *v = (x * x + y * y).powf(inv) * scale;
        }
    })?;
    Ok(SampleBatch { values, seed, method: SamplingMethod::Physical })
}

/// Inverse-transform draws through [`snr_quantile`].
pub fn sample_inverse(ch: &Channel, count: usize, seed: u64) -> Result<SampleBatch> {
    let values = generate(count, seed, |rng, out| {
        for v in out.iter_mut() {
            let u: f64 = rng.random();
            *v = quantile_unchecked(ch, u);
        }
    })?;
    Ok(SampleBatch { values, seed, method: SamplingMethod::InverseCdf })
}
