//! Closed-form performance metrics, their high-SNR asymptotes, and the
//! quadrature reference every closed form is checked against.

use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};
use std::str::FromStr;

use crate::distribution::{snr_cdf, Channel};
use crate::error::{Error, Result};
use crate::quad::{integrate_with_breaks, Tolerance};
use crate::special::{digamma, fox_h, gamma, gauss_2f1, q_function, ContourConfig, FoxHParams, EULER_GAMMA};

/// Coherent binary modulation, characterised by φ in P_b = E[Q(√(2φγ))].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Bpsk,
    Bfsk,
    Msk,
    Custom(f64),
}

impl Modulation {
    pub fn custom(phi: f64) -> Result<Self> {
        if !(phi > 0.0 && phi <= 1.0) {
            return Err(Error::Parameter(format!("modulation phi must lie in (0, 1], got {phi}")));
        }
        Ok(Modulation::Custom(phi))
    }

    pub fn phi(&self) -> f64 {
        match *self {
            Modulation::Bpsk => 1.0,
            Modulation::Bfsk => 0.5,
            Modulation::Msk => 0.715,
            Modulation::Custom(phi) => phi,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Modulation::Bpsk => "bpsk".into(),
            Modulation::Bfsk => "bfsk".into(),
            Modulation::Msk => "msk".into(),
            Modulation::Custom(phi) => format!("custom({phi})"),
        }
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Modulation::Bpsk),
            "bfsk" => Ok(Modulation::Bfsk),
            "msk" => Ok(Modulation::Msk),
            other => match other.parse::<f64>() {
                Ok(phi) => Modulation::custom(phi),
                Err(_) => Err(Error::Parameter(format!("unknown modulation '{s}' (bpsk, bfsk, msk or a phi value)"))),
            },
        }
    }
}

/// Outage threshold, either a target rate R₀ [bit/s/Hz] or an SNR γ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    Rate(f64),
    Snr(f64),
}

impl Threshold {
    /// γ₀, converting a rate through γ₀ = 2^R₀ − 1.
    pub fn gamma0(&self) -> Result<f64> {
        match *self {
            Threshold::Rate(r) if r > 0.0 && r.is_finite() => Ok(r.exp2() - 1.0),
            Threshold::Snr(g) if g > 0.0 && g.is_finite() => Ok(g),
            Threshold::Rate(v) | Threshold::Snr(v) => {
                Err(Error::Domain(format!("outage threshold must be positive, got {v}")))
            }
        }
    }
}

/// High-SNR power law metric ≈ (G_c γ̄)^(−G_d).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoteResult {
    pub coding_gain: f64,
    pub diversity_gain: f64,
}

impl AsymptoteResult {
    pub fn value_at(&self, mean_snr: f64) -> f64 {
        (self.coding_gain * mean_snr).powf(-self.diversity_gain)
    }
}

/// How a metric value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    ClosedForm,
    /// The closed form failed to converge and the defining integral was used.
    QuadratureFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluated {
    pub value: f64,
    pub method: EvalMethod,
}

impl Evaluated {
    pub fn is_fallback(&self) -> bool {
        self.method == EvalMethod::QuadratureFallback
    }
}

/// Blocklength N, information bits K and the linearisation constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShortPacketConfig {
    pub blocklength: u32,
    pub info_bits: u32,
    pub eta: f64,
    pub delta: f64,
    pub mu: f64,
    pub upsilon: f64,
}

impl ShortPacketConfig {
    pub fn new(blocklength: u32, info_bits: u32) -> Result<Self> {
        if blocklength < 1 || info_bits < 1 {
            return Err(Error::Argument(format!(
                "blocklength and information bits must be positive, got N = {blocklength}, K = {info_bits}"
            )));
        }
        let rate = info_bits as f64 / blocklength as f64;
        let eta = rate.exp2() - 1.0;
        let delta = (blocklength as f64 / (2.0 * PI)).sqrt() / ((2.0 * rate).exp2() - 1.0).sqrt();
        let half_width = (PI / (2.0 * delta * delta)).sqrt();
        Ok(Self { blocklength, info_bits, eta, delta, mu: eta - half_width, upsilon: eta + half_width })
    }

    /// Lower edge of the linear region clamped to the SNR support.
    pub fn mu_clamped(&self) -> f64 {
        self.mu.max(0.0)
    }

    fn slope(&self) -> f64 {
        self.delta / (2.0 * PI).sqrt()
    }
}

/// A metric together with its configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum MetricSpec {
    Outage { threshold: Threshold },
    Ber { modulation: Modulation },
    Capacity,
    Bler { packet: ShortPacketConfig },
}

impl MetricSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MetricSpec::Outage { .. } => "op",
            MetricSpec::Ber { .. } => "ber",
            MetricSpec::Capacity => "capacity",
            MetricSpec::Bler { .. } => "bler",
        }
    }

    /// Per-realisation value whose mean over Γ is the metric.
    pub fn conditional(&self, snr: f64) -> f64 {
        match *self {
            MetricSpec::Outage { threshold } => {
                let g0 = threshold.gamma0().unwrap_or(f64::NAN);
                if snr <= g0 {
                    1.0
                } else {
                    0.0
                }
            }
            MetricSpec::Ber { modulation } => q_function((2.0 * modulation.phi() * snr).sqrt()),
            MetricSpec::Capacity => snr.ln_1p() / LN_2,
            MetricSpec::Bler { packet } => bler_linearized(snr, &packet),
        }
    }
}

// ---------------------------------------------------------------- outage

/// P_out = F_Γ(γ₀).
pub fn outage_probability(ch: &Channel, threshold: Threshold) -> Result<f64> {
    snr_cdf(ch, threshold.gamma0()?)
}

/// G_c = 1 / (γ₀ ζ^(1/α) λ^(1/α)), G_d = α.
pub fn outage_asymptotic(ch: &Channel, gamma0: f64) -> Result<AsymptoteResult> {
    let g0 = Threshold::Snr(gamma0).gamma0()?;
    let a = ch.alpha();
    Ok(AsymptoteResult { coding_gain: 1.0 / (g0 * (ch.zeta() * ch.lambda()).powf(1.0 / a)), diversity_gain: a })
}

// ---------------------------------------------------------------- BER

/// Average BER through the H^{1,4}_{4,2} closed form, falling back to the
/// defining integral when the contour integral does not converge.
pub fn ber_exact(ch: &Channel, modulation: Modulation) -> Result<Evaluated> {
    with_fallback(ber_closed_form(ch, modulation, &ContourConfig::default()), |v| v > 0.0 && v < 0.5, || {
        quadrature_reference(&MetricSpec::Ber { modulation }, ch)
    })
}

/// The closed form alone, without fallback.
pub fn ber_closed_form(ch: &Channel, modulation: Modulation, cfg: &ContourConfig) -> Result<f64> {
    let (a, l) = (ch.alpha(), ch.lambda());
    let h = FoxHParams::new(
        1,
        4,
        4,
        2,
        vec![(0.5, a), (0.5, 0.0), (1.0 - l, 1.0), (1.0, a)],
        vec![(1.0, 1.0), (0.0, a)],
    )?;
    let arg = ch.zeta() / (ch.mean_snr() * modulation.phi()).powf(a);
    Ok(a / (2.0 * PI * gamma(l)?) * fox_h(&h, arg, cfg)?)
}

/// G_c = (2 φ^α √π / (λ ζ Γ(½ + α)))^(1/α), G_d = α.
pub fn ber_asymptotic(ch: &Channel, modulation: Modulation) -> Result<AsymptoteResult> {
    let (a, l) = (ch.alpha(), ch.lambda());
    let gc = (2.0 * modulation.phi().powf(a) * PI.sqrt() / (l * ch.zeta() * gamma(0.5 + a)?)).powf(1.0 / a);
    Ok(AsymptoteResult { coding_gain: gc, diversity_gain: a })
}

// ---------------------------------------------------------------- capacity

/// Ergodic capacity [bit/s/Hz] through the H^{3,2}_{3,3} closed form.
pub fn capacity_exact(ch: &Channel) -> Result<Evaluated> {
    with_fallback(capacity_closed_form(ch, &ContourConfig::default()), |v| v >= 0.0, || {
        quadrature_reference(&MetricSpec::Capacity, ch)
    })
}

pub fn capacity_closed_form(ch: &Channel, cfg: &ContourConfig) -> Result<f64> {
    let (a, l) = (ch.alpha(), ch.lambda());
    let h = FoxHParams::new(
        3,
        2,
        3,
        3,
        vec![(1.0 - l, 1.0), (0.0, a), (1.0, a)],
        vec![(1.0, 1.0), (0.0, a), (0.0, a)],
    )?;
    let arg = ch.zeta() / ch.mean_snr().powf(a);
    Ok(a / (LN_2 * gamma(l)?) * fox_h(&h, arg, cfg)?)
}

/// High-SNR capacity (1/(α ln 2)) [ln(γ̄^α/ζ) − γ_E − Ψ(λ)].
pub fn capacity_asymptotic(ch: &Channel) -> Result<f64> {
    let a = ch.alpha();
    Ok((a * ch.mean_snr().ln() - ch.zeta().ln() - EULER_GAMMA - digamma(ch.lambda())?) / (a * LN_2))
}

// ---------------------------------------------------------------- BLER

/// Piecewise-linear BLER of a short packet at instantaneous SNR γ.
pub fn bler_linearized(gamma: f64, cfg: &ShortPacketConfig) -> f64 {
    if gamma <= cfg.mu {
        1.0
    } else if gamma >= cfg.upsilon {
        0.0
    } else {
        (0.5 - cfg.slope() * (gamma - cfg.eta)).clamp(0.0, 1.0)
    }
}

/// Average BLER through the ₂F₁ closed form.
///
/// The bracket multiplying c₂ enters with a plus sign: it is λk times the
/// probability mass on [μ, υ], which the defining integral adds.
pub fn bler_exact(ch: &Channel, cfg: &ShortPacketConfig) -> Result<Evaluated> {
    with_fallback(bler_closed_form(ch, cfg), |v| (-1e-12..=1.0 + 1e-12).contains(&v), || {
        quadrature_reference(&MetricSpec::Bler { packet: *cfg }, ch)
    })
    .map(|e| Evaluated { value: e.value.clamp(0.0, 1.0), ..e })
}

/// Θ^(p)(x) = ₂F₁(1+λ, (p+α)/α; (p+2α)/α; −x).
pub fn theta(ch: &Channel, p: u8, x: f64) -> Result<f64> {
    let (a, l) = (ch.alpha(), ch.lambda());
    let p = p as f64;
    gauss_2f1(1.0 + l, (p + a) / a, (p + 2.0 * a) / a, -x)
}

pub fn bler_closed_form(ch: &Channel, cfg: &ShortPacketConfig) -> Result<f64> {
    let (a, l) = (ch.alpha(), ch.lambda());
    let k = ch.k();
    let mu = cfg.mu_clamped();
    let up = cfg.upsilon;
    let c1 = cfg.slope() * a * l * k / (1.0 + a);
    let c2 = (0.5 + cfg.slope() * cfg.eta) * l * k;
    let term = |x: f64, p: u8| -> Result<f64> {
        if x == 0.0 {
            return Ok(0.0);
        }
        let power = x.powf(a + p as f64);
        Ok(power * theta(ch, p, k * x.powf(a))?)
    };
    let bracket1 = term(up, 1)? - term(mu, 1)?;
    let bracket0 = term(up, 0)? - term(mu, 0)?;
    Ok(snr_cdf(ch, mu)? - c1 * bracket1 + c2 * bracket0)
}

/// Largest kυ^α for which the asymptote is evaluated.
pub const BLER_ASYMPTOTE_GUARD: f64 = 0.1;

/// High-SNR BLER λkμ^α − c₁(υ^(α+1) − μ^(α+1)) + c₂(υ^α − μ^α).
pub fn bler_asymptotic(ch: &Channel, cfg: &ShortPacketConfig) -> Result<f64> {
    let (a, l) = (ch.alpha(), ch.lambda());
    let k = ch.k();
    let mu = cfg.mu_clamped();
    let up = cfg.upsilon;
    let x = k * up.powf(a);
    if !(x < BLER_ASYMPTOTE_GUARD) {
        return Err(Error::Domain(format!(
            "mean SNR too low for the BLER asymptote (ζυ^α/γ̄^α = {x:.3} ≥ {BLER_ASYMPTOTE_GUARD}); use bler_exact"
        )));
    }
    let c1 = cfg.slope() * a * l * k / (1.0 + a);
    let c2 = (0.5 + cfg.slope() * cfg.eta) * l * k;
    Ok(l * k * mu.powf(a) - c1 * (up.powf(a + 1.0) - mu.powf(a + 1.0)) + c2 * (up.powf(a) - mu.powf(a)))
}

// ---------------------------------------------------------------- reference

fn with_fallback(
    closed: Result<f64>,
    in_range: impl Fn(f64) -> bool,
    reference: impl FnOnce() -> Result<f64>,
) -> Result<Evaluated> {
    match closed {
        Ok(v) if v.is_finite() && in_range(v) => Ok(Evaluated { value: v, method: EvalMethod::ClosedForm }),
        Err(e) if e.is_usage() => Err(e),
        outcome => {
            log::warn!("closed form unusable ({outcome:?}); falling back to quadrature");
            Ok(Evaluated { value: reference()?, method: EvalMethod::QuadratureFallback })
        }
    }
}

const REFERENCE_TOL: Tolerance = Tolerance { abs: 0.0, rel: 1e-12 };
/// Acceptance floor when the tight target is roundoff-limited.
const REFERENCE_FLOOR: Tolerance = Tolerance { abs: 1e-9, rel: 1e-8 };

/// Evaluates the defining integral of a metric by adaptive quadrature.
///
/// The integral ∫ g(γ) f_Γ(γ) dγ is taken in u = ln(kγ^α), where the density
/// becomes λeᵘ(1+eᵘ)^(−λ−1) du and both tails decay exponentially.
pub fn quadrature_reference(metric: &MetricSpec, ch: &Channel) -> Result<f64> {
    let (a, l) = (ch.alpha(), ch.lambda());
    let ln_k = ch.k().ln();
    let to_u = |g: f64| ln_k + a * g.ln();
    let weight = |u: f64| {
        let lg = if u > 36.0 { u } else { u.exp().ln_1p() };
        l * (u - (l + 1.0) * lg).exp()
    };
    let snr_of = |u: f64| ((u - ln_k) / a).exp();

    match *metric {
        MetricSpec::Outage { threshold } => outage_probability(ch, threshold),
        MetricSpec::Ber { modulation } => {
            let phi = modulation.phi();
            let feature = [to_u(0.01 / phi), to_u(1.0 / phi), to_u(30.0 / phi)];
            let g = |u: f64| q_function((2.0 * phi * snr_of(u)).sqrt()) * weight(u);
            run_reference(g, &half_line_breaks(&feature, l), "BER")
        }
        MetricSpec::Capacity => {
            let feature = [to_u(0.01), to_u(1.0), to_u(100.0)];
            let g = |u: f64| snr_of(u).ln_1p() / LN_2 * weight(u);
            run_reference(g, &half_line_breaks(&feature, l), "capacity")
        }
        MetricSpec::Bler { packet } => {
            let mu = packet.mu_clamped();
            let up = packet.upsilon;
            let u_hi = to_u(up);
            let u_lo = if mu > 0.0 { to_u(mu) } else { u_hi.min(0.0) - 80.0 };
            let g = |u: f64| bler_linearized(snr_of(u), &packet) * weight(u);
            let n = ((u_hi - u_lo).ceil() as usize).clamp(4, 200);
            let breaks: Vec<f64> = (0..=n).map(|i| u_lo + (u_hi - u_lo) * i as f64 / n as f64).collect();
            Ok(snr_cdf(ch, mu)? + run_reference(g, &breaks, "BLER")?)
        }
    }
}

/// Unit-spaced breakpoints covering the features and both exponential tails.
fn half_line_breaks(features: &[f64], lambda: f64) -> Vec<f64> {
    let lo = features.iter().copied().fold(0.0, f64::min) - 60.0;
    let hi = features.iter().copied().fold(0.0, f64::max) + 60.0 / lambda.min(1.0);
    let n = (hi - lo).ceil() as usize;
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn run_reference(g: impl Fn(f64) -> f64, breaks: &[f64], what: &str) -> Result<f64> {
    let r = integrate_with_breaks(g, breaks, REFERENCE_TOL, 20_000);
    if r.converged || r.abs_err <= REFERENCE_FLOOR.abs.max(REFERENCE_FLOOR.rel * r.value.abs()) {
        Ok(r.value)
    } else {
        Err(Error::Convergence { what: format!("{what} reference quadrature (estimate {})", r.value), achieved: r.abs_err })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::snr_pdf;
    use crate::quad::integrate;

    fn ch(a: f64, l: f64, g: f64) -> Channel {
        Channel::from_parts(a, l, g).unwrap()
    }

    fn db(x: f64) -> f64 {
        10f64.powf(x / 10.0)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn modulation_phi() {
        assert_eq!(Modulation::Bpsk.phi(), 1.0);
        assert_eq!(Modulation::Bfsk.phi(), 0.5);
        assert_eq!(Modulation::Msk.phi(), 0.715);
        assert!(Modulation::custom(0.0).is_err());
        assert!(Modulation::custom(1.5).is_err());
        assert_eq!("MSK".parse::<Modulation>().unwrap(), Modulation::Msk);
        assert_eq!("0.8".parse::<Modulation>().unwrap(), Modulation::Custom(0.8));
        assert!("qam".parse::<Modulation>().is_err());
    }

    #[test]
    fn outage_examples() {
        let c = ch(1.0, 2.0, 10.0);
        let p = outage_probability(&c, Threshold::Snr(1.0)).unwrap();
        assert!((p - (1.0 - 1.1f64.powi(-2))).abs() < 1e-15);
        assert!((p - 0.173_553_7).abs() < 1e-7);
        assert_eq!(Threshold::Rate(1.0).gamma0().unwrap(), 1.0);
        assert!(outage_probability(&c, Threshold::Snr(0.0)).is_err());
        assert!(outage_probability(&c, Threshold::Rate(-1.0)).is_err());
        let far = outage_probability(&ch(1.0, 2.0, 1e30), Threshold::Snr(1.0)).unwrap();
        assert!(far < 1e-29);
    }

    #[test]
    fn outage_asymptote() {
        let c = ch(1.0, 2.0, 100.0);
        let asy = outage_asymptotic(&c, 1.0).unwrap();
        assert_eq!(asy.diversity_gain, 1.0);
        assert!((asy.coding_gain - 0.5).abs() < 1e-14);
        assert!((asy.value_at(100.0) - 0.02).abs() < 1e-15);
        let exact = outage_probability(&c, Threshold::Snr(1.0)).unwrap();
        assert!((exact - 0.019_703).abs() < 1e-6);
        let c = ch(2.7, 1.3, 1.0);
        let asy = outage_asymptotic(&c, 1.0).unwrap();
        let slope = (asy.value_at(1e6).log10() - asy.value_at(1e4).log10()) / 2.0;
        assert!((slope + 2.7).abs() < 1e-9);
    }

    #[test]
    fn ber_closed_form_vs_reference() {
        let c = ch(1.75, 1.25, db(10.0));
        let exact = ber_exact(&c, Modulation::Bpsk).unwrap();
        assert_eq!(exact.method, EvalMethod::ClosedForm);
        let reference = quadrature_reference(&MetricSpec::Ber { modulation: Modulation::Bpsk }, &c).unwrap();
        assert!(rel(exact.value, reference) < 1e-8);
        // mpmath quadrature of the defining integral
        assert!(rel(exact.value, 0.009_952_149_595_124_408) < 1e-8);
        assert!(rel(reference, 0.009_952_149_595_124_408) < 1e-9);
    }

    #[test]
    fn ber_modulation_ordering_and_monotonicity() {
        let c = ch(1.75, 1.25, db(15.0));
        let b = ber_exact(&c, Modulation::Bpsk).unwrap().value;
        let m = ber_exact(&c, Modulation::Msk).unwrap().value;
        let f = ber_exact(&c, Modulation::Bfsk).unwrap().value;
        assert!(b < m && m < f);
        let mut prev = 0.5;
        for snr_db in (0..=60).step_by(10) {
            let v = ber_exact(&ch(1.75, 1.25, db(snr_db as f64)), Modulation::Bpsk).unwrap().value;
            assert!(v < prev && v > 0.0);
            prev = v;
        }
    }

    #[test]
    fn ber_asymptote_examples() {
        let c = ch(1.0, 2.0, 1000.0);
        let asy = ber_asymptotic(&c, Modulation::Bpsk).unwrap();
        assert!((asy.coding_gain - 2.0).abs() < 1e-13);
        assert!((asy.value_at(1000.0) - 5e-4).abs() < 1e-16);
        let exact = ber_exact(&c, Modulation::Bpsk).unwrap().value;
        assert!(rel(exact, 4.988_787_336_817_794_6e-4) < 1e-8);
        assert!(rel(asy.value_at(1000.0), exact) < 0.02);
        for m in [Modulation::Bfsk, Modulation::Msk] {
            assert_eq!(ber_asymptotic(&c, m).unwrap().diversity_gain, 1.0);
        }
        let mut last_gap = f64::INFINITY;
        for snr_db in [50.0, 60.0, 70.0] {
            let c = ch(1.0, 2.0, db(snr_db));
            let ratio = ber_exact(&c, Modulation::Bpsk).unwrap().value
                / ber_asymptotic(&c, Modulation::Bpsk).unwrap().value_at(db(snr_db));
            let gap = (ratio - 1.0).abs();
            assert!(gap < last_gap, "{snr_db} dB: ratio {ratio}");
            last_gap = gap;
        }
    }

    #[test]
    fn capacity_examples() {
        let c = ch(2.0, 1.5, 10.0);
        let exact = capacity_exact(&c).unwrap();
        assert_eq!(exact.method, EvalMethod::ClosedForm);
        let reference = quadrature_reference(&MetricSpec::Capacity, &c).unwrap();
        assert!(rel(exact.value, reference) < 1e-9);
        assert!(rel(exact.value, 3.117_766_773_872_405) < 1e-9);
        let tiny = capacity_exact(&ch(2.0, 1.5, 1e-8)).unwrap().value;
        assert!((0.0..2e-8).contains(&tiny));
        let c7 = capacity_exact(&ch(7.0, 1.5, 100.0)).unwrap().value;
        let awgn = 101f64.log2();
        assert!(c7 < awgn && (awgn - c7) / awgn < 0.03);
    }

    #[test]
    fn capacity_asymptote_examples() {
        let c = ch(1.0, 2.0, std::f64::consts::E);
        assert!(capacity_asymptotic(&c).unwrap().abs() < 1e-14);
        let c = ch(1.0, 2.0, 100.0);
        assert!((capacity_asymptotic(&c).unwrap() - (100f64.ln() - 1.0) / LN_2).abs() < 1e-13);
        assert!((capacity_asymptotic(&c).unwrap() - 5.2011).abs() < 1e-4);
        let c = ch(2.0, 1.5, 1e4);
        let gap = capacity_exact(&c).unwrap().value - capacity_asymptotic(&c).unwrap();
        assert!(gap.abs() <= 0.01, "{gap}");
    }

    #[test]
    fn short_packet_constants() {
        let sp = ShortPacketConfig::new(100, 50).unwrap();
        assert!((sp.eta - 0.414_213_6).abs() < 1e-7);
        assert!((sp.delta - 3.989_422_8).abs() < 1e-7);
        assert!((sp.mu - 0.100_054_3).abs() < 1e-7);
        assert!((sp.upsilon - 0.728_372_8).abs() < 1e-7);
        assert!(((sp.upsilon - sp.eta) - PI / 10.0).abs() < 1e-12);
        let sp2 = ShortPacketConfig::new(200, 50).unwrap();
        assert!((sp2.eta - 0.189_207_1).abs() < 1e-7);
        assert!(ShortPacketConfig::new(0, 5).is_err());
        assert!(ShortPacketConfig::new(5, 0).is_err());
        for (n, k) in [(1, 1), (10, 1), (100, 50), (1000, 900)] {
            let s = ShortPacketConfig::new(n, k).unwrap();
            assert!(s.mu < s.eta && s.eta < s.upsilon);
        }
        assert!(ShortPacketConfig::new(2, 1).unwrap().mu < 0.0);
    }

    #[test]
    fn bler_linear_branch() {
        let sp = ShortPacketConfig::new(100, 50).unwrap();
        assert_eq!(bler_linearized(sp.eta, &sp), 0.5);
        assert_eq!(bler_linearized(0.05, &sp), 1.0);
        assert_eq!(bler_linearized(0.8, &sp), 0.0);
        let want = 0.5 - (3.989_422_8 / 2.506_628_3) * (0.5 - 0.414_213_6);
        assert!((bler_linearized(0.5, &sp) - want).abs() < 1e-7);
        assert!((bler_linearized(0.5, &sp) - 0.3634).abs() < 1e-4);
        // continuity at the corners
        assert!((bler_linearized(sp.mu + 1e-12, &sp) - 1.0).abs() < 1e-9);
        assert!(bler_linearized(sp.upsilon - 1e-12, &sp).abs() < 1e-9);
    }

    #[test]
    fn bler_closed_form_vs_reference() {
        let sp = ShortPacketConfig::new(100, 50).unwrap();
        let c = ch(1.75, 1.25, db(5.0));
        let exact = bler_exact(&c, &sp).unwrap();
        assert_eq!(exact.method, EvalMethod::ClosedForm);
        let reference = quadrature_reference(&MetricSpec::Bler { packet: sp }, &c).unwrap();
        assert!(rel(exact.value, reference) < 1e-9);
        assert!(rel(exact.value, 0.059_469_866_981_778_876) < 1e-9);
        // independent: plain quadrature over γ
        let direct = snr_cdf(&c, sp.mu).unwrap()
            + integrate(|g| bler_linearized(g, &sp) * snr_pdf(&c, g).unwrap(), sp.mu, sp.upsilon, Tolerance::new(0.0, 1e-13), 200)
                .value;
        assert!(rel(exact.value, direct) < 1e-10);
    }

    #[test]
    fn bler_saturation_and_monotonicity() {
        let sp = ShortPacketConfig::new(100, 50).unwrap();
        assert!(bler_exact(&ch(1.75, 1.25, 1e-6), &sp).unwrap().value > 1.0 - 1e-6);
        assert!(bler_exact(&ch(1.75, 1.25, 1e8), &sp).unwrap().value < 1e-12);
        let mut prev = 1.0;
        for snr_db in (-10..=40).step_by(5) {
            let v = bler_exact(&ch(1.75, 1.25, db(snr_db as f64)), &sp).unwrap().value;
            assert!(v < prev, "{snr_db} dB");
            prev = v;
        }
    }

    #[test]
    fn theta_zero_identity() {
        // λkυ^α Θ⁽⁰⁾(kυ^α) = 1 − (1 + kυ^α)^(−λ) at α = 1, λ = 2
        let c = ch(1.0, 2.0, 1.0);
        for x in [0.05, 0.7283728, 3.0, 250.0] {
            let lhs = 2.0 * x * theta(&c, 0, x).unwrap();
            let rhs = 1.0 - (1.0 + x).powi(-2);
            assert!((lhs - rhs).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn bler_asymptote_examples() {
        let sp = ShortPacketConfig::new(100, 50).unwrap();
        let c = ch(1.0, 2.0, 1e4);
        let asy = bler_asymptotic(&c, &sp).unwrap();
        assert!(rel(asy, 2.0 * sp.eta / 1e4) < 1e-12);
        assert!((asy - 8.284e-5).abs() < 1e-8);
        let exact = bler_exact(&c, &sp).unwrap().value;
        assert!(rel(exact, 8.283_657_877_568_487e-5) < 1e-9);
        assert!(rel(asy, exact) < 0.05);
        assert!(bler_asymptotic(&ch(1.0, 2.0, 1.0), &sp).is_err());
        let a = bler_asymptotic(&ch(1.75, 1.25, 1e4), &sp).unwrap();
        let b = bler_asymptotic(&ch(1.75, 1.25, 1e5), &sp).unwrap();
        assert!(((b.log10() - a.log10()) + 1.75).abs() < 1e-9);
    }

    #[test]
    fn small_blocklength_clamps_mu() {
        let sp = ShortPacketConfig::new(2, 1).unwrap();
        let c = ch(0.75, 2.5, db(10.0));
        let exact = bler_exact(&c, &sp).unwrap().value;
        let reference = quadrature_reference(&MetricSpec::Bler { packet: sp }, &c).unwrap();
        assert!(rel(exact, reference) < 1e-8, "{exact} vs {reference}");
        assert!(bler_asymptotic(&ch(0.75, 2.5, 1e6), &sp).unwrap() > 0.0);
    }

    #[test]
    fn reference_outage_is_cdf() {
        let c = ch(2.0, 1.25, 3.0);
        let v = quadrature_reference(&MetricSpec::Outage { threshold: Threshold::Snr(1.0) }, &c).unwrap();
        assert_eq!(v, snr_cdf(&c, 1.0).unwrap());
    }
}
