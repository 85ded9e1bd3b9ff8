//! Derivative-free minimisation (Nelder–Mead).

/// Nelder–Mead coefficients and stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop once the largest vertex distance from the best vertex falls below this.
    pub diameter_tol: f64,
    pub max_evals: usize,
    /// Initial simplex edge along each coordinate.
    pub initial_step: f64,
    /// Extra runs restarted from the incumbent after convergence.
    pub restarts: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            diameter_tol: 1e-8,
            max_evals: 5000,
            initial_step: 0.25,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub n_evals: usize,
    pub converged: bool,
}

impl NelderMead {
    /// Minimises `f` from `x0`. Non-finite objective values count as +∞.
    pub fn minimize<F>(&self, mut f: F, x0: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };

        let mut best_x = x0.to_vec();
        let mut best_v = eval(&best_x, &mut evals);
        let mut converged = false;
        let mut step = self.initial_step;
        for run in 0..=self.restarts {
            if evals >= self.max_evals {
                break;
            }
            let (x, v, ok) = self.run(&mut eval, &best_x, best_v, step, &mut evals);
            let improved = v < best_v;
            if v <= best_v {
                best_x = x;
                best_v = v;
            }
            converged = ok;
            if !ok || (run > 0 && !improved) {
                break;
            }
            step = (step * 0.5).max(1e-3);
        }
        Minimum { x: best_x, value: best_v, n_evals: evals, converged }
    }

    fn run<E>(&self, eval: &mut E, x0: &[f64], v0: f64, step: f64, evals: &mut usize) -> (Vec<f64>, f64, bool)
    where
        E: FnMut(&[f64], &mut usize) -> f64,
    {
        let n = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), v0));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += step;
            let v = eval(&x, evals);
            simplex.push((x, v));
        }

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if diameter < self.diameter_tol {
                let (x, v) = simplex.swap_remove(0);
                return (x, v, true);
            }
            if *evals >= self.max_evals {
                let (x, v) = simplex.swap_remove(0);
                return (x, v, false);
            }

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect()
            };

            let xr = along(self.reflection);
            let vr = eval(&xr, evals);
            if vr < simplex[0].1 {
                let xe = along(self.reflection * self.expansion);
                let ve = eval(&xe, evals);
                simplex[n] = if ve < vr { (xe, ve) } else { (xr, vr) };
                continue;
            }
            if vr < simplex[n - 1].1 {
                simplex[n] = (xr, vr);
                continue;
            }
            let (xc, vc) = if vr < simplex[n].1 {
                let xc = along(self.reflection * self.contraction);
                let vc = eval(&xc, evals);
                (xc, vc)
            } else {
                let xc = along(-self.contraction);
                let vc = eval(&xc, evals);
                (xc, vc)
            };
            if vc < simplex[n].1.min(vr) {
                simplex[n] = (xc, vc);
                continue;
            }
            let best = simplex[0].0.clone();
            for (x, v) in simplex.iter_mut().skip(1) {
                for (xi, bi) in x.iter_mut().zip(&best) {
                    *xi = bi + self.shrink * (*xi - bi);
                }
                *v = eval(x, evals);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = NelderMead::default().minimize(f, &[-1.2, 1.0]);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{m:?}");
        assert!(m.n_evals <= 5000);
    }

    #[test]
    fn quadratic_three_dims() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2) + 0.1 * (x[2] - 3.0).powi(2);
        let m = NelderMead::default().minimize(f, &[0.0, 0.0, 0.0]);
        assert!(m.converged);
        for (x, t) in m.x.iter().zip([1.0, -0.5, 3.0]) {
            assert!((x - t).abs() < 1e-6);
        }
    }

    #[test]
    fn non_finite_values_are_avoided() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.1).powi(2) };
        let m = NelderMead::default().minimize(f, &[0.5]);
        assert!((m.x[0] - 0.1).abs() < 1e-6);
        assert!(m.value.is_finite());
    }

    #[test]
    fn evaluation_cap_reports_non_convergence() {
        let cfg = NelderMead { max_evals: 20, ..NelderMead::default() };
        let m = cfg.minimize(|x: &[f64]| x.iter().map(|v| v * v).sum(), &[5.0, 5.0, 5.0]);
        assert!(!m.converged);
        assert!(m.n_evals <= 25);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 2.0).powi(4) + (x[1] * x[0] - 1.0).powi(2);
        let a = NelderMead::default().minimize(f, &[0.3, 0.7]);
        let b = NelderMead::default().minimize(f, &[0.3, 0.7]);
        assert_eq!(a, b);
    }
}
