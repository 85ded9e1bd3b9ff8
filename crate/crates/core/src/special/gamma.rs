//! Gamma-family functions: complex log-gamma, real gamma, digamma, beta.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// ln(2π)/2
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Stirling series coefficients B_{2k} / (2k(2k-1)), k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Below this modulus the argument is shifted upward before the Stirling series.
const STIRLING_MIN_MODULUS: f64 = 15.0;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Principal branch of ln Γ(z).
///
/// The branch is the one continuous on ℂ minus the non-positive real axis,
/// equivalently the one satisfying ln Γ(z+1) = ln Γ(z) + ln z with principal ln.
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && is_nonpositive_integer(z.re) {
        return Err(Error::Domain(format!("log-gamma pole at z = {}", z.re)));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log-gamma of non-finite argument {z}")));
    }
    // ln Γ(z) = ln Γ(z+n) − Σ_{k<n} ln(z+k); the sum is split into modulus and
    // argument so the imaginary part stays on the principal branch.
    let mut shifted = z;
    let mut ln_modulus = 0.0;
    let mut arg_sum = 0.0;
    while shifted.re < 0.0 || shifted.norm() < STIRLING_MIN_MODULUS {
        ln_modulus += shifted.norm().ln();
        arg_sum += shifted.im.atan2(shifted.re);
        shifted += 1.0;
    }
    Ok(stirling(shifted) - Complex64::new(ln_modulus, arg_sum))
}

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for &c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series * inv
}

/// ln |Γ(x)| for real x.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x > 0.0 {
        return Ok(log_gamma_complex(Complex64::new(x, 0.0))?.re);
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Domain(format!("gamma pole at x = {x}")));
    }
    // reflection: |Γ(x)| = π / (|sin πx| Γ(1−x))
    Ok(PI.ln() - (PI * x).sin().abs().ln() - ln_gamma(1.0 - x)?)
}

/// Γ(x) for real x (including negative non-integers).
pub fn gamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Domain(format!("gamma pole at x = {x}")));
    }
    if x > 0.0 {
        return Ok(ln_gamma(x)?.exp());
    }
    Ok(PI / ((PI * x).sin() * gamma(1.0 - x)?))
}

/// 1/Γ(x), zero at the poles of Γ.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma(x).unwrap_or(f64::INFINITY)
    }
}

/// Euler–Beta function B(a, b) for a, b > 0.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("beta({a}, {b}) requires positive arguments")));
    }
    Ok((ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?).exp())
}

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Digamma Ψ(x) for x > 0, via upward recurrence and the asymptotic series.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    Ok(digamma_unchecked(x))
}

/// Digamma on the whole real line minus the poles (reflection for x < 0).
pub(crate) fn digamma_real(x: f64) -> f64 {
    if x > 0.0 {
        digamma_unchecked(x)
    } else {
        // Ψ(1−x) − Ψ(x) = π cot(πx)
        digamma_unchecked(1.0 - x) - PI / (PI * x).tan()
    }
}

fn digamma_unchecked(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Σ B_{2k}/(2k x^{2k}), k = 1..7
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32_760.0 - inv2 / 12.0))))));
    acc + x.ln() - 0.5 / x - tail
}
