//! Fox H-function of real positive argument by Mellin–Barnes contour quadrature.
//!
//! H^{m,n}_{p,q}[z] = (1/2πi) ∫_L Φ(s) z^(−s) ds with
//!
//!   Φ(s) = ∏_{j≤m} Γ(b_j + B_j s) ∏_{j≤n} Γ(1 − a_j − A_j s)
//!        / ( ∏_{j>m} Γ(1 − b_j − B_j s) ∏_{j>n} Γ(a_j + A_j s) )
//!
//! and L the vertical line Re s = c inside the strip separating the left pole
//! family (from Γ(b_j + B_j s), j ≤ m) from the right one (Γ(1 − a_j − A_j s), j ≤ n).

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::{gamma, log_gamma_complex};
use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

/// Orders and coefficient pairs of one H-function instance.
#[derive(Debug, Clone, PartialEq)]
pub struct FoxHParams {
    m: usize,
    n: usize,
    upper: Vec<(f64, f64)>,
    lower: Vec<(f64, f64)>,
    strip: (f64, f64),
}

impl FoxHParams {
    /// Validates orders, coefficient signs and the existence of a contour strip.
    pub fn new(m: usize, n: usize, p: usize, q: usize, upper: Vec<(f64, f64)>, lower: Vec<(f64, f64)>) -> Result<Self> {
        if upper.len() != p || lower.len() != q {
            return Err(Error::Parameter(format!(
                "H-function lists have lengths ({}, {}) but orders p = {p}, q = {q}",
                upper.len(),
                lower.len()
            )));
        }
        if m > q || n > p {
            return Err(Error::Parameter(format!("H-function orders need m ≤ q and n ≤ p, got m={m} n={n} p={p} q={q}")));
        }
        if upper.iter().chain(lower.iter()).any(|&(v, k)| !(k >= 0.0) || !v.is_finite() || !k.is_finite()) {
            return Err(Error::Parameter("H-function coefficients must be finite and non-negative".into()));
        }
        let left = lower[..m]
            .iter()
            .filter(|&&(_, bb)| bb > 0.0)
            .map(|&(b, bb)| -b / bb)
            .fold(f64::NEG_INFINITY, f64::max);
        let right = upper[..n]
            .iter()
            .filter(|&&(_, aa)| aa > 0.0)
            .map(|&(a, aa)| (1.0 - a) / aa)
            .fold(f64::INFINITY, f64::min);
        if !(left < right) {
            return Err(Error::Parameter(format!(
                "no contour strip separates the pole families (left bound {left}, right bound {right})"
            )));
        }
        Ok(Self { m, n, upper, lower, strip: (left, right) })
    }

    pub fn orders(&self) -> (usize, usize, usize, usize) {
        (self.m, self.n, self.upper.len(), self.lower.len())
    }

    /// Open interval of admissible contour abscissae.
    pub fn strip(&self) -> (f64, f64) {
        self.strip
    }

    /// Exponential decay rate parameter a* of the integrand along the contour.
    pub fn decay_parameter(&self) -> f64 {
        let sum = |v: &[(f64, f64)]| v.iter().map(|x| x.1).sum::<f64>();
        sum(&self.upper[..self.n]) - sum(&self.upper[self.n..]) + sum(&self.lower[..self.m]) - sum(&self.lower[self.m..])
    }
}

/// Where the vertical contour is placed inside the strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourPlacement {
    /// Midpoint of the strip.
    Midpoint,
    /// Abscissa minimising |Φ(c) z^(−c)| on the real axis, which keeps the
    /// integrand's magnitude closest to the value of the integral.
    Saddle,
}

#[derive(Debug, Clone, Copy)]
pub struct ContourConfig {
    pub rel_tolerance: f64,
    /// Bound on the half-length of the truncated contour.
    pub max_truncation: f64,
    /// Budget of integrand evaluations.
    pub max_nodes: usize,
    pub placement: ContourPlacement,
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self { rel_tolerance: 1e-10, max_truncation: 2000.0, max_nodes: 2_000_000, placement: ContourPlacement::Saddle }
    }
}

impl ContourConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tolerance > 0.0) {
            return Err(Error::Parameter("contour rel_tolerance must be positive".into()));
        }
        if self.max_nodes < 64 {
            return Err(Error::Parameter("contour max_nodes must be at least 64".into()));
        }
        if !(self.max_truncation > 0.0) {
            return Err(Error::Parameter("contour max_truncation must be positive".into()));
        }
        Ok(())
    }
}

/// Full diagnostics of one evaluation.
#[derive(Debug, Clone, Copy)]
pub struct FoxHEvaluation {
    pub value: f64,
    /// Imaginary part of the contour integral (zero for an exact evaluation).
    pub imag_residue: f64,
    pub error_estimate: f64,
    pub abscissa: f64,
    pub truncation: f64,
    pub evaluations: usize,
}

struct Kernel<'a> {
    h: &'a FoxHParams,
    ln_z: f64,
}

impl Kernel<'_> {
    /// ln Φ(s) − s ln z over the non-constant factors; None when a
    /// denominator gamma sits on a pole (integrand is zero there).
    fn ln_integrand(&self, s: Complex64) -> Option<Complex64> {
        let h = self.h;
        let mut acc = -s * self.ln_z;
        for (j, &(b, bb)) in h.lower.iter().enumerate() {
            if bb == 0.0 {
                continue;
            }
            if j < h.m {
                acc += log_gamma_complex(s * bb + b).ok()?;
            } else {
                match log_gamma_complex(-s * bb + (1.0 - b)) {
                    Ok(v) => acc -= v,
                    Err(_) => return None,
                }
            }
        }
        for (j, &(a, aa)) in h.upper.iter().enumerate() {
            if aa == 0.0 {
                continue;
            }
            if j < h.n {
                acc += log_gamma_complex(-s * aa + (1.0 - a)).ok()?;
            } else {
                match log_gamma_complex(s * aa + a) {
                    Ok(v) => acc -= v,
                    Err(_) => return None,
                }
            }
        }
        Some(acc)
    }

    fn value(&self, c: f64, t: f64) -> Complex64 {
        match self.ln_integrand(Complex64::new(c, t)) {
            Some(l) if l.re > -745.0 => l.exp(),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    fn ln_magnitude(&self, c: f64) -> f64 {
        match self.ln_integrand(Complex64::new(c, 0.0)) {
            Some(l) if l.re.is_finite() => l.re,
            _ => f64::INFINITY,
        }
    }
}

/// Product of the gamma factors attached to zero coefficients; None when a
/// denominator factor is a pole (the whole function vanishes).
fn constant_factor(h: &FoxHParams) -> Result<Option<f64>> {
    let mut c = 1.0;
    for (j, &(b, bb)) in h.lower.iter().enumerate() {
        if bb != 0.0 {
            continue;
        }
        if j < h.m {
            c *= gamma(b).map_err(|_| Error::Parameter(format!("constant factor Γ({b}) is a pole")))?;
        } else {
            match gamma(1.0 - b) {
                Ok(g) => c /= g,
                Err(_) => return Ok(None),
            }
        }
    }
    for (j, &(a, aa)) in h.upper.iter().enumerate() {
        if aa != 0.0 {
            continue;
        }
        if j < h.n {
            c *= gamma(1.0 - a).map_err(|_| Error::Parameter(format!("constant factor Γ({}) is a pole", 1.0 - a)))?;
        } else {
            match gamma(a) {
                Ok(g) => c /= g,
                Err(_) => return Ok(None),
            }
        }
    }
    Ok(Some(c))
}

fn choose_abscissa(kernel: &Kernel, strip: (f64, f64), placement: ContourPlacement) -> f64 {
    let (left, right) = strip;
    let (lo, hi) = match (left.is_finite(), right.is_finite()) {
        (true, true) => (left, right),
        (true, false) => (left, left + 20.0),
        (false, true) => (right - 20.0, right),
        (false, false) => (-10.0, 10.0),
    };
    let mid = 0.5 * (lo + hi);
    if placement == ContourPlacement::Midpoint || !(left.is_finite() || right.is_finite()) && kernel.ln_z == 0.0 {
        return if left.is_finite() && right.is_finite() { mid } else { mid.clamp(lo, hi) };
    }
    let margin = 1e-6 * (hi - lo);
    let (mut a, mut b) = (lo + margin, hi - margin);
    let g = |c: f64| kernel.ln_magnitude(c);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..80 {
        if g1 <= g2 {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - ratio * (b - a);
            g1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + ratio * (b - a);
            g2 = g(x2);
        }
    }
    let best = 0.5 * (a + b);
    if g(best).is_finite() {
        best
    } else {
        mid
    }
}

/// Evaluates H(z) for z > 0.
pub fn fox_h(h: &FoxHParams, z: f64, cfg: &ContourConfig) -> Result<f64> {
    fox_h_detailed(h, z, cfg).map(|e| e.value)
}

/// Like [`fox_h`], returning the diagnostics of the contour integration.
pub fn fox_h_detailed(h: &FoxHParams, z: f64, cfg: &ContourConfig) -> Result<FoxHEvaluation> {
    cfg.validate()?;
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("H-function argument must be positive and finite, got {z}")));
    }
    let Some(constant) = constant_factor(h)? else {
        return Ok(FoxHEvaluation {
            value: 0.0,
            imag_residue: 0.0,
            error_estimate: 0.0,
            abscissa: f64::NAN,
            truncation: 0.0,
            evaluations: 0,
        });
    };
    let kernel = Kernel { h, ln_z: z.ln() };
    let c = choose_abscissa(&kernel, h.strip, cfg.placement);
    let decay = h.decay_parameter();

    // First pass targets the integrand scale; the second tightens the
    // tolerance to the magnitude of the first-pass result.
    let scale = kernel.value(c, 0.0).norm().max(f64::MIN_POSITIVE);
    let mut target = cfg.rel_tolerance * scale;
    let mut evaluations = 0usize;
    let mut last: Option<(Complex64, f64, f64)> = None;
    for _pass in 0..3 {
        let (total, err, truncation, evals) = integrate_line(&kernel, c, decay, target, cfg, evaluations)?;
        evaluations += evals;
        let value = total.re / (2.0 * PI);
        let achieved = err / (2.0 * PI);
        last = Some((total, err, truncation));
        let wanted = cfg.rel_tolerance * value.abs();
        if achieved <= wanted || target <= 0.5 * wanted * 2.0 * PI && achieved <= 4.0 * wanted {
            break;
        }
        let new_target = 0.5 * cfg.rel_tolerance * total.re.abs();
        if new_target >= target {
            break;
        }
        target = new_target.max(scale * 1e-3 * f64::EPSILON);
    }
    let (total, err, truncation) = last.expect("at least one pass");
    let value = total.re / (2.0 * PI);
    let error_estimate = err / (2.0 * PI);
    if error_estimate > cfg.rel_tolerance * value.abs() * 10.0 && error_estimate > 1e-300 {
        return Err(Error::Convergence {
            what: "H-function contour integral".into(),
            achieved: error_estimate / value.abs().max(f64::MIN_POSITIVE),
        });
    }
    Ok(FoxHEvaluation {
        value: constant * value,
        imag_residue: constant * total.im / (2.0 * PI),
        error_estimate: constant.abs() * error_estimate,
        abscissa: c,
        truncation,
        evaluations,
    })
}

/// ∫_{−T}^{T} Φ(c+it) z^(−c−it) dt over geometrically growing panels.
fn integrate_line(
    kernel: &Kernel,
    c: f64,
    decay: f64,
    target: f64,
    cfg: &ContourConfig,
    spent: usize,
) -> Result<(Complex64, f64, f64, usize)> {
    const PANELS_BUDGET: f64 = 24.0;
    let panel_tol = Tolerance::new(target / PANELS_BUDGET, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evaluations = 0usize;
    let mut lo = 0.0;
    let mut width: f64 = 1.0;
    loop {
        let hi = (lo + width).min(cfg.max_truncation);
        for sign in [1.0, -1.0] {
            let remaining = cfg.max_nodes.saturating_sub(spent + evaluations);
            if remaining < 21 {
                return Err(Error::Convergence { what: "H-function contour (node budget)".into(), achieved: err });
            }
            let r = quad::integrate(|t| kernel.value(c, sign * t), lo, hi, panel_tol, remaining / 42 + 1);
            evaluations += r.evaluations;
            total += r.value;
            err += r.abs_err;
        }
        let edge = kernel.value(c, hi).norm() + kernel.value(c, -hi).norm();
        evaluations += 2;
        let tail = if decay > 0.0 { edge * 2.0 / (PI * decay) } else { edge * hi };
        if tail <= panel_tol.abs && hi > 1.0 {
            return Ok((total, err + tail, hi, evaluations));
        }
        if hi >= cfg.max_truncation {
            return Err(Error::Convergence {
                what: format!("H-function contour (truncation {hi} reached)"),
                achieved: (err + tail) / total.norm().max(f64::MIN_POSITIVE),
            });
        }
        lo = hi;
        width *= 2.0;
    }
}
