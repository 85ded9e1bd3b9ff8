use std::f64::consts::SQRT_2;

/// Gaussian tail probability Q(x) = P(N(0,1) > x) = ½ erfc(x/√2).
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetry_and_tail() {
        assert_eq!(q_function(0.0), 0.5);
        assert!((q_function(-1.3) - (1.0 - q_function(1.3))).abs() < 1e-16);
        assert_eq!(q_function(f64::INFINITY), 0.0);
        assert!(q_function(40.0) < 1e-300);
    }

    // mpmath: erfc(x/√2)/2 at 40 digits
    #[test]
    fn reference_values() {
        let q = q_function(1.96);
        assert!((q - 0.024_997_895_148_220_436).abs() <= 1e-14 * q);
        let q = q_function(10.0);
        assert!((q - 7.619_853_024_160_526e-24).abs() <= 1e-14 * q);
    }
}
