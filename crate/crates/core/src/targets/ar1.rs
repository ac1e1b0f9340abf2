use rand_distr::{Distribution, StandardNormal};

use crate::chain::chain_rng;

/// Stationary Gaussian AR(1) with unit marginal variance:
/// x_t = ρ x_{t-1} + √(1-ρ²) ε_t, x_0 ~ N(0, 1).
pub fn ar1_generate(rho: f64, n: usize, seed: u64) -> Vec<f64> {
    assert!(rho.abs() < 1.0, "AR(1) needs |rho| < 1");
    let mut rng = chain_rng(seed, 0);
    let s = (1.0 - rho * rho).sqrt();
    let mut out = Vec::with_capacity(n);
    let mut x: f64 = StandardNormal.sample(&mut rng);
    for _ in 0..n {
        out.push(x);
        let e: f64 = StandardNormal.sample(&mut rng);
        x = rho * x + s * e;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lag1(xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|a| (a - m).powi(2)).sum::<f64>();
        xs.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum::<f64>() / v
    }

    #[test]
    fn white_noise_and_reproducibility() {
        let a = ar1_generate(0.0, 100_000, 5);
        assert!(lag1(&a).abs() <= 0.02);
        assert_eq!(a, ar1_generate(0.0, 100_000, 5));
        let b = ar1_generate(0.5, 100_000, 5);
        assert!((lag1(&b) - 0.5).abs() < 0.02);
    }
}
