use statrs::distribution::{ContinuousCDF, Normal};

use crate::density::LogDensity;

/// Equal-weight mixture of two isotropic normals in R².
#[derive(Clone, Debug)]
pub struct Mog2 {
    pub mu1: [f64; 2],
    pub mu2: [f64; 2],
    pub var: f64,
}

impl Default for Mog2 {
    fn default() -> Self {
        Self { mu1: [2.0, 0.0], mu2: [-2.0, 0.0], var: 0.5 }
    }
}

impl Mog2 {
    fn component_logs(&self, x: &[f64]) -> (f64, f64) {
        let norm = -(2.0 * std::f64::consts::PI * self.var).ln();
        let q = |m: &[f64; 2]| -0.5 * ((x[0] - m[0]).powi(2) + (x[1] - m[1]).powi(2)) / self.var;
        (norm + q(&self.mu1), norm + q(&self.mu2))
    }

    /// Probability of the axis-aligned box [a0, b0] × [a1, b1].
    pub fn box_mass(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let n = Normal::new(0.0, self.var.sqrt()).expect("positive variance");
        let comp = |m: &[f64; 2]| (n.cdf(b[0] - m[0]) - n.cdf(a[0] - m[0])) * (n.cdf(b[1] - m[1]) - n.cdf(a[1] - m[1]));
        0.5 * comp(&self.mu1) + 0.5 * comp(&self.mu2)
    }

    /// Cell masses of a `bins` × `bins` grid over [lo, hi]², row-major in x₀.
    pub fn grid_masses(&self, lo: f64, hi: f64, bins: usize) -> Vec<f64> {
        let w = (hi - lo) / bins as f64;
        let mut out = Vec::with_capacity(bins * bins);
        for i in 0..bins {
            for j in 0..bins {
                let a = [lo + i as f64 * w, lo + j as f64 * w];
                out.push(self.box_mass(a, [a[0] + w, a[1] + w]));
            }
        }
        out
    }
}

impl LogDensity for Mog2 {
    fn dim(&self) -> usize {
        2
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        let (a, b) = self.component_logs(x);
        let m = a.max(b);
        m + ((a - m).exp() * 0.5 + (b - m).exp() * 0.5).ln()
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let (a, b) = self.component_logs(x);
        let m = a.max(b);
        let (wa, wb) = ((a - m).exp(), (b - m).exp());
        let (ra, rb) = (wa / (wa + wb), wb / (wa + wb));
        Some(
            (0..2)
                .map(|i| -(ra * (x[i] - self.mu1[i]) + rb * (x[i] - self.mu2[i])) / self.var)
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::gradient_error;
    use approx::assert_abs_diff_eq;

    #[test]
    fn value_at_a_mode() {
        let m = Mog2::default();
        let expect = (0.5 / std::f64::consts::PI * (1.0 + (-16.0f64).exp())).ln();
        assert_abs_diff_eq!(m.log_density(&[2.0, 0.0]), expect, epsilon = 1e-14);
        assert_abs_diff_eq!(m.log_density(&[2.0, 0.0]), (0.5 / std::f64::consts::PI).ln(), epsilon = 1e-6);
    }

    #[test]
    fn symmetric_in_first_coordinate() {
        let m = Mog2::default();
        assert_eq!(m.log_density(&[1.3, -0.4]), m.log_density(&[-1.3, -0.4]));
        assert_eq!(m.gradient(&[0.0, 0.0]).unwrap()[0], 0.0);
    }

    #[test]
    fn gradient_and_grid_mass() {
        let m = Mog2::default();
        for x in [[0.1, 0.2], [2.5, -1.0], [-3.0, 0.7]] {
            assert!(gradient_error(&m, &x, 1e-6).unwrap() < 1e-6);
        }
        let total: f64 = m.grid_masses(-5.0, 5.0, 20).iter().sum();
        assert!(total >= 0.999 && total <= 1.0 + 1e-12);
    }
}
