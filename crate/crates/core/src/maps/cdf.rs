/// Boundary clamp keeping F(x) inside the open unit interval.
pub const CDF_CLAMP: f64 = 1e-15;

/// Default irrational shift, 1/√2.
pub const DEFAULT_SHIFT: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A strictly increasing continuous CDF on the real line with its inverse.
pub trait Cdf1d: Send + Sync {
    fn cdf(&self, x: f64) -> f64;
    fn quantile(&self, u: f64) -> f64;
}

/// x' = F⁻¹((F(x) + c) mod 1), clamped away from {0, 1} by `clamp`.
pub fn cdf_map(f: &dyn Cdf1d, x: f64, c: f64, clamp: f64) -> f64 {
    let u = (f.cdf(x) + c).rem_euclid(1.0);
    f.quantile(u.clamp(clamp, 1.0 - clamp))
}
