//! Fitting α-Lomax parameters to binned densities (RAD minimisation) or to
//! raw samples (maximum likelihood).

use std::io::Read;
use std::path::Path;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{snr_pdf, AlphaLomaxParams, Channel, SampleBatch};
use crate::error::{Error, Result};
use crate::optimize::NelderMead;

/// Model densities below this are floored before taking logs.
pub const DENSITY_FLOOR: f64 = 1e-300;
/// Allowed deviation of the loaded mass from one before a warning is issued.
pub const MASS_TOLERANCE: f64 = 0.02;
/// Candidate shapes for the default initialisation.
pub const INIT_ALPHA_GRID: [f64; 5] = [0.75, 1.0, 1.5, 2.0, 3.0];

/// A binned probability density, normalised to unit mass.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPdf {
    centers: Vec<f64>,
    densities: Vec<f64>,
    widths: Vec<f64>,
    original_mass: f64,
}

impl EmpiricalPdf {
    /// Builds from bin centres, densities and per-bin widths.
    pub fn new(centers: Vec<f64>, densities: Vec<f64>, widths: Vec<f64>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::Argument("empirical PDF has no bins".into()));
        }
        if centers.len() != densities.len() || centers.len() != widths.len() {
            return Err(Error::Argument("centers, densities and widths differ in length".into()));
        }
        for i in 0..centers.len() {
            if !centers[i].is_finite() {
                return Err(Error::Argument(format!("bin {i}: non-finite center")));
            }
            if i > 0 && centers[i] <= centers[i - 1] {
                return Err(Error::Argument(format!("bin {i}: centers must be strictly increasing")));
            }
            if !(densities[i].is_finite() && densities[i] >= 0.0) {
                return Err(Error::Argument(format!("bin {i}: density must be finite and ≥ 0")));
            }
            if !(widths[i].is_finite() && widths[i] > 0.0) {
                return Err(Error::Argument(format!("bin {i}: width must be positive")));
            }
        }
        let mass: f64 = densities.iter().zip(&widths).map(|(d, w)| d * w).sum();
        if mass <= 0.0 {
            return Err(Error::Argument("empirical PDF has zero mass".into()));
        }
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            warn!("empirical PDF mass is {mass}, renormalising to 1");
        }
        let densities = densities.into_iter().map(|d| d / mass).collect();
        Ok(Self { centers, densities, widths, original_mass: mass })
    }

    pub fn with_uniform_width(centers: Vec<f64>, densities: Vec<f64>, width: f64) -> Result<Self> {
        let widths = vec![width; centers.len()];
        Self::new(centers, densities, widths)
    }

    /// Builds from centres alone; each bin extends halfway to its neighbours.
    pub fn from_centers(centers: Vec<f64>, densities: Vec<f64>) -> Result<Self> {
        if centers.len() < 2 {
            return Err(Error::Argument("at least two bins are needed to infer widths".into()));
        }
        let n = centers.len();
        let widths = (0..n)
            .map(|i| {
                let lo = if i == 0 { centers[1] - centers[0] } else { centers[i] - centers[i - 1] };
                let hi = if i == n - 1 { centers[n - 1] - centers[n - 2] } else { centers[i + 1] - centers[i] };
                0.5 * (lo + hi)
            })
            .collect();
        Self::new(centers, densities, widths)
    }

    /// Builds from bin edges and raw counts.
    pub fn from_edges(low: &[f64], high: &[f64], counts: &[f64]) -> Result<Self> {
        if low.len() != high.len() || low.len() != counts.len() {
            return Err(Error::Argument("edges and counts differ in length".into()));
        }
        let total: f64 = counts.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Argument("histogram has no counts".into()));
        }
        let centers = low.iter().zip(high).map(|(l, h)| 0.5 * (l + h)).collect();
        let widths: Vec<f64> = low.iter().zip(high).map(|(l, h)| h - l).collect();
        let densities = counts.iter().zip(&widths).map(|(c, w)| c / (total * w)).collect();
        Self::new(centers, densities, widths)
    }

    /// Histogram of `values` on `bins` equal bins over `[lo, hi]`. Values outside are dropped.
    pub fn from_samples(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if bins == 0 || !(hi > lo) {
            return Err(Error::Argument("histogram needs bins ≥ 1 and hi > lo".into()));
        }
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0.0; bins];
        for &v in values {
            if v >= lo && v <= hi {
                let i = (((v - lo) / width) as usize).min(bins - 1);
                counts[i] += 1.0;
            }
        }
        let low: Vec<f64> = (0..bins).map(|i| lo + i as f64 * width).collect();
        let high: Vec<f64> = (0..bins).map(|i| lo + (i + 1) as f64 * width).collect();
        Self::from_edges(&low, &high, &counts)
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Mass before renormalisation.
    pub fn original_mass(&self) -> f64 {
        self.original_mass
    }

    pub fn was_renormalized(&self) -> bool {
        (self.original_mass - 1.0).abs() > MASS_TOLERANCE
    }

    /// Mean of the binned variable.
    pub fn mean(&self) -> f64 {
        self.weighted(|x| x)
    }

    fn weighted(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.centers
            .iter()
            .zip(&self.densities)
            .zip(&self.widths)
            .map(|((c, d), w)| g(*c) * d * w)
            .sum()
    }

    /// Evaluates `q` at the bin centres, floors it and normalises it on this grid.
    pub fn discretize(&self, q: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.len());
        for &c in &self.centers {
            let v = q(c);
            if v.is_nan() || v < 0.0 {
                return Err(Error::Domain(format!("model density is {v} at {c}")));
            }
            out.push(if v.is_finite() { v.max(DENSITY_FLOOR) } else { f64::MAX });
        }
        let mass: f64 = out.iter().zip(&self.widths).map(|(q, w)| q * w).sum();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Domain(format!("model mass on the grid is {mass}")));
        }
        for q in &mut out {
            *q = (*q / mass).max(DENSITY_FLOOR);
        }
        Ok(out)
    }
}

fn kl_grid(p: &[f64], q: &[f64], widths: &[f64]) -> f64 {
    let d: f64 = p
        .iter()
        .zip(q)
        .zip(widths)
        .filter(|((p, _), _)| **p > 0.0)
        .map(|((p, q), w)| p * (p / q.max(DENSITY_FLOOR)).ln() * w)
        .sum();
    d.max(0.0)
}

fn resistor(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else if a.is_infinite() {
        b
    } else if b.is_infinite() {
        a
    } else {
        a * b / (a + b)
    }
}

/// Directed KL divergences `(D(p‖q), D(q‖p))` of two densities on a common grid.
pub fn kl_pair_discrete(p: &[f64], q: &[f64], widths: &[f64]) -> (f64, f64) {
    let floored: Vec<f64> = p.iter().map(|v| v.max(DENSITY_FLOOR)).collect();
    (kl_grid(p, q, widths), kl_grid(q, &floored, widths))
}

/// Resistor-average distance of two densities on a common grid.
pub fn rad_discrete(p: &[f64], q: &[f64], widths: &[f64]) -> f64 {
    let (a, b) = kl_pair_discrete(p, q, widths);
    resistor(a, b)
}

/// D(p‖q) = Σ pᵢ ln(pᵢ/qᵢ) wᵢ with `q` discretised on the grid of `p`.
pub fn kl_divergence(p: &EmpiricalPdf, q: impl Fn(f64) -> f64) -> Result<f64> {
    let qd = p.discretize(q)?;
    Ok(kl_grid(&p.densities, &qd, &p.widths))
}

/// Resistor-average distance D(p‖q)D(q‖p)/(D(p‖q)+D(q‖p)).
pub fn rad(p: &EmpiricalPdf, q: impl Fn(f64) -> f64) -> Result<f64> {
    let qd = p.discretize(q)?;
    Ok(rad_discrete(&p.densities, &qd, &p.widths))
}

/// The variable an empirical PDF is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitDomain {
    /// Instantaneous SNR (power).
    #[default]
    Snr,
    /// Envelope r = √γ.
    Envelope,
}

impl std::str::FromStr for FitDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "snr" | "power" => Ok(Self::Snr),
            "envelope" | "amplitude" => Ok(Self::Envelope),
            other => Err(Error::Argument(format!("unknown fit domain '{other}' (snr, envelope)"))),
        }
    }
}

/// Model density of the channel in the given domain.
pub fn model_density(ch: &Channel, domain: FitDomain, x: f64) -> f64 {
    match domain {
        FitDomain::Snr => snr_pdf(ch, x).unwrap_or(0.0),
        FitDomain::Envelope => {
            if x <= 0.0 {
                0.0
            } else {
                2.0 * x * snr_pdf(ch, x * x).unwrap_or(0.0)
            }
        }
    }
}

/// Starting point for a fit; infeasible λ is projected inside λ > 1/α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitInit {
    pub alpha: f64,
    pub lambda: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub params: AlphaLomaxParams,
    /// Fitted mean SNR γ̄ (in the envelope domain, the mean of r²).
    pub scale: f64,
    /// Final RAD or negative log-likelihood.
    pub objective: f64,
    pub n_evals: usize,
    pub converged: bool,
    pub domain: FitDomain,
}

impl FitResult {
    pub fn channel(&self) -> Result<Channel> {
        Channel::new(self.params, self.scale)
    }
}

/// Margin kept between λ and 1/α when projecting a starting point.
const FEASIBILITY_MARGIN: f64 = 1e-3;

fn encode(init: FitInit) -> Result<[f64; 3]> {
    if !(init.alpha > 0.0 && init.alpha.is_finite() && init.scale > 0.0 && init.scale.is_finite()) {
        return Err(Error::Parameter("initial α and scale must be positive".into()));
    }
    if !init.lambda.is_finite() {
        return Err(Error::Parameter("initial λ must be finite".into()));
    }
    let excess = (init.lambda - 1.0 / init.alpha).max(FEASIBILITY_MARGIN);
    Ok([init.alpha.ln(), excess.ln(), init.scale.ln()])
}

fn decode(x: &[f64]) -> (f64, f64, f64) {
    let alpha = x[0].exp();
    (alpha, 1.0 / alpha + x[1].exp(), x[2].exp())
}

fn fit_from<F>(objective: F, start: FitInit, domain: FitDomain) -> Result<FitResult>
where
    F: Fn(f64, f64, f64) -> f64,
{
    let x0 = encode(start)?;
    let m = NelderMead::default().minimize(
        |x| {
            let (a, l, s) = decode(x);
            objective(a, l, s)
        },
        &x0,
    );
    let (alpha, lambda, scale) = decode(&m.x);
    let params = AlphaLomaxParams::new(alpha, lambda)?;
    if !m.value.is_finite() {
        return Err(Error::Convergence { what: "fit objective stayed non-finite".into(), achieved: m.value });
    }
    Ok(FitResult { params, scale, objective: m.value, n_evals: m.n_evals, converged: m.converged, domain })
}

fn probe<F>(objective: &F, scale: f64) -> FitInit
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    let scores: Vec<f64> = INIT_ALPHA_GRID
        .par_iter()
        .map(|&a| objective(a, 1.0 / a + 1.0, scale))
        .map(|v| if v.is_finite() { v } else { f64::INFINITY })
        .collect();
    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i] < scores[best] {
            best = i;
        }
    }
    let alpha = INIT_ALPHA_GRID[best];
    FitInit { alpha, lambda: 1.0 / alpha + 1.0, scale }
}

/// RAD between the data and the model with the given parameters.
pub fn rad_objective(data: &EmpiricalPdf, domain: FitDomain, alpha: f64, lambda: f64, scale: f64) -> f64 {
    let Ok(ch) = Channel::from_parts(alpha, lambda, scale) else {
        return f64::INFINITY;
    };
    rad(data, |x| model_density(&ch, domain, x)).unwrap_or(f64::INFINITY)
}

/// Minimises the RAD between `data` and the α-Lomax density over (α, λ, γ̄).
pub fn fit_rad(data: &EmpiricalPdf, domain: FitDomain, init: Option<FitInit>) -> Result<FitResult> {
    let objective = |a: f64, l: f64, s: f64| rad_objective(data, domain, a, l, s);
    let start = match init {
        Some(i) => i,
        None => {
            let scale = match domain {
                FitDomain::Snr => data.mean(),
                FitDomain::Envelope => data.weighted(|r| r * r),
            };
            if !(scale > 0.0) {
                return Err(Error::Argument("empirical mean must be positive".into()));
            }
            probe(&objective, scale)
        }
    };
    fit_from(objective, start, domain)
}

/// Minimum sample count accepted by [`fit_mle`].
pub const MLE_MIN_SAMPLES: usize = 100;
const NLL_CHUNK: usize = 4096;

/// Log-likelihood data with precomputed logarithms.
#[derive(Debug, Clone)]
pub struct LogLikelihood {
    ln_x: Vec<f64>,
}

impl LogLikelihood {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.len() < MLE_MIN_SAMPLES {
            return Err(Error::Argument(format!(
                "maximum likelihood needs at least {MLE_MIN_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        if let Some(bad) = samples.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Argument(format!("samples must be positive and finite, found {bad}")));
        }
        Ok(Self { ln_x: samples.iter().map(|v| v.ln()).collect() })
    }

    /// Negative log-likelihood; +∞ outside the parameter space.
    pub fn nll(&self, alpha: f64, lambda: f64, scale: f64) -> f64 {
        if !(alpha > 0.0 && scale > 0.0 && lambda * alpha > 1.0 && alpha.is_finite() && lambda.is_finite()) {
            return f64::INFINITY;
        }
        let Ok(params) = AlphaLomaxParams::new(alpha, lambda) else {
            return f64::INFINITY;
        };
        let ln_zeta = params.zeta().ln();
        let ln_k = ln_zeta - alpha * scale.ln();
        let head = alpha.ln() + lambda.ln() + ln_k;
        let partial: Vec<f64> = self
            .ln_x
            .par_chunks(NLL_CHUNK)
            .map(|chunk| {
                chunk
                    .iter()
                    .map(|&lx| {
                        let t = ln_k + alpha * lx;
                        let log1p_exp = if t > 30.0 { t + (-t).exp().ln_1p() } else { t.exp().ln_1p() };
                        head + (alpha - 1.0) * lx - (lambda + 1.0) * log1p_exp
                    })
                    .sum::<f64>()
            })
            .collect();
        -partial.iter().sum::<f64>()
    }
}

/// Maximum-likelihood fit over (α, λ, γ̄). Degenerate (constant) samples give
/// `converged = false` without running the optimiser.
pub fn fit_mle(samples: &SampleBatch, init: Option<FitInit>) -> Result<FitResult> {
    let ll = LogLikelihood::new(&samples.values)?;
    let n = samples.values.len() as f64;
    let mean = samples.values.iter().sum::<f64>() / n;
    let (lo, hi) = samples
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if lo == hi {
        warn!("all samples equal {lo}; likelihood is unbounded");
        let params = AlphaLomaxParams::new(1.0, 2.0)?;
        let objective = ll.nll(1.0, 2.0, mean);
        return Ok(FitResult { params, scale: mean, objective, n_evals: 1, converged: false, domain: FitDomain::Snr });
    }
    let objective = |a: f64, l: f64, s: f64| ll.nll(a, l, s);
    let start = init.unwrap_or_else(|| probe(&objective, mean));
    fit_from(objective, start, FitDomain::Snr)
}

fn parse_err(line: u64, msg: impl Into<String>) -> Error {
    Error::Parse { line: line as usize, msg: msg.into() }
}

/// Reads an empirical PDF from CSV with header `bin_center,density` or
/// `bin_edge_low,bin_edge_high,count`.
pub fn read_empirical<R: Read>(reader: R) -> Result<EmpiricalPdf> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).flexible(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let names: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    let edges = match names.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["bin_center", "density"] => false,
        ["bin_edge_low", "bin_edge_high", "count"] => true,
        _ => {
            return Err(parse_err(
                1,
                format!("unrecognised header '{}'; expected bin_center,density or bin_edge_low,bin_edge_high,count", names.join(",")),
            ))
        }
    };
    let width = if edges { 3 } else { 2 };
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); width];
    for record in rdr.records() {
        let record = record.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(parse_err(line, format!("expected {width} fields, found {}", record.len())));
        }
        let mut row = [0.0; 3];
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| parse_err(line, format!("'{field}' is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("non-finite value '{field}'")));
            }
            row[j] = v;
        }
        let last = row[width - 1];
        if last < 0.0 {
            let what = if edges { "count" } else { "density" };
            return Err(parse_err(line, format!("negative {what} {last}")));
        }
        if edges && row[1] <= row[0] {
            return Err(parse_err(line, "bin_edge_high must exceed bin_edge_low"));
        }
        let center = if edges { 0.5 * (row[0] + row[1]) } else { row[0] };
        if let Some(&prev) = (if edges { cols[0].last().zip(cols[1].last()).map(|(a, b)| 0.5 * (a + b)) } else { cols[0].last().copied() })
            .as_ref()
        {
            if center <= prev {
                return Err(parse_err(line, "bin centers must be strictly increasing"));
            }
        }
        for j in 0..width {
            cols[j].push(row[j]);
        }
    }
    if cols[0].is_empty() {
        return Err(parse_err(2, "no data rows"));
    }
    if edges {
        EmpiricalPdf::from_edges(&cols[0], &cols[1], &cols[2])
    } else {
        let densities = cols.pop().unwrap_or_default();
        let centers = cols.pop().unwrap_or_default();
        EmpiricalPdf::from_centers(centers, densities)
    }
}

/// Reads an empirical PDF from a CSV file.
pub fn load_empirical(path: impl AsRef<Path>) -> Result<EmpiricalPdf> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_empirical(std::io::BufReader::new(file))
}
