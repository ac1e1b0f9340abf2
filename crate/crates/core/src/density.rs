use std::sync::Arc;

use crate::point::JointPoint;

/// Unnormalized log-density on R^dim with an optional analytic gradient.
pub trait LogDensity: Send + Sync {
    fn dim(&self) -> usize;
    fn log_density(&self, x: &[f64]) -> f64;
    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// Log-density of a whole joint point. Kernels add their auxiliary terms on top.
pub trait PointDensity: Send + Sync {
    fn log_density(&self, z: &JointPoint) -> f64;
}

/// Lifts a density on the target block to joint points.
#[derive(Clone)]
pub struct OnX(pub Arc<dyn LogDensity>);

impl PointDensity for OnX {
    fn log_density(&self, z: &JointPoint) -> f64 {
        self.0.log_density(&z.x)
    }
}

/// Density that ignores the point entirely (kernels acting on auxiliaries only).
pub struct Flat;

impl PointDensity for Flat {
    fn log_density(&self, _z: &JointPoint) -> f64 {
        0.0
    }
}

type DensityFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Closure-backed density, handy for tests and one-off targets.
pub struct FnDensity {
    dim: usize,
    f: Box<DensityFn>,
    g: Option<Box<GradientFn>>,
}

impl FnDensity {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { dim, f: Box::new(f), g: None }
    }

    pub fn with_gradient(mut self, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.g = Some(Box::new(g));
        self
    }
}

impl LogDensity for FnDensity {
    fn dim(&self) -> usize {
        self.dim
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.g.as_ref().map(|g| g(x))
    }
}

/// Largest relative discrepancy between the analytic gradient and central
/// differences with step `h * max(1, |x_i|)`. `None` if there is no gradient.
pub fn gradient_error(d: &dyn LogDensity, x: &[f64], h: f64) -> Option<f64> {
    let g = d.gradient(x)?;
    let mut worst = 0.0f64;
    let mut y = x.to_vec();
    for i in 0..x.len() {
        let step = h * x[i].abs().max(1.0);
        y[i] = x[i] + step;
        let up = d.log_density(&y);
        y[i] = x[i] - step;
        let down = d.log_density(&y);
        y[i] = x[i];
        let fd = (up - down) / (2.0 * step);
        worst = worst.max((fd - g[i]).abs() / g[i].abs().max(1.0));
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_check_on_quadratic() {
        let d = FnDensity::new(2, |x| -0.5 * (x[0] * x[0] + 3.0 * x[1] * x[1]))
            .with_gradient(|x| vec![-x[0], -3.0 * x[1]]);
        assert!(gradient_error(&d, &[0.3, -1.2], 1e-6).unwrap() < 1e-7);
        let wrong = FnDensity::new(1, |x| -x[0] * x[0]).with_gradient(|x| vec![-x[0]]);
        assert!(gradient_error(&wrong, &[1.0], 1e-6).unwrap() > 0.5);
    }
}
