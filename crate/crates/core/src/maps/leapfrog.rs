use std::sync::Arc;

use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::point::JointPoint;

use super::FlowMap;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeapfrogConfig {
    pub eps: f64,
    pub k: usize,
}

impl LeapfrogConfig {
    pub fn new(eps: f64, k: usize) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Config(format!("leapfrog step size must be positive, got {eps}")));
        }
        if k == 0 {
            return Err(Error::Config("leapfrog needs at least one step".into()));
        }
        Ok(Self { eps, k })
    }
}

/// Explicit leapfrog L^k for H = -log p(x) + ½ vᵀ M⁻¹ v with diagonal M⁻¹.
/// Acts on x and the first dim(x) entries of v.
#[derive(Clone)]
pub struct Leapfrog {
    pub target: Arc<dyn LogDensity>,
    pub cfg: LeapfrogConfig,
    pub inv_mass: Vec<f64>,
}

impl Leapfrog {
    pub fn new(target: Arc<dyn LogDensity>, cfg: LeapfrogConfig) -> Self {
        let d = target.dim();
        Self { target, cfg, inv_mass: vec![1.0; d] }
    }

    pub fn with_inv_mass(mut self, inv_mass: Vec<f64>) -> Self {
        self.inv_mass = inv_mass;
        self
    }

    fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = self.target.gradient(x).ok_or_else(|| Error::Config("leapfrog needs a gradient".into()))?;
        if g.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFiniteGradient(x.to_vec()));
        }
        Ok(g)
    }

    fn run(&self, z: &JointPoint, sign: f64) -> Result<(JointPoint, f64)> {
        let d = z.x.len();
        if z.v.len() < d || self.inv_mass.len() != d {
            return Err(Error::Layout("leapfrog: momentum/mass dimension mismatch".into()));
        }
        let h = sign * self.cfg.eps;
        let mut p = z.clone();
        let mut g = self.grad(&p.x)?;
        for _ in 0..self.cfg.k {
            for i in 0..d {
                p.v[i] += 0.5 * h * g[i];
            }
            for i in 0..d {
                p.x[i] += h * self.inv_mass[i] * p.v[i];
            }
            g = self.grad(&p.x)?;
            for i in 0..d {
                p.v[i] += 0.5 * h * g[i];
            }
        }
        Ok((p, 0.0))
    }
}

impl FlowMap for Leapfrog {
    fn name(&self) -> String {
        format!("leapfrog(eps={}, k={})", self.cfg.eps, self.cfg.k)
    }
    fn forward(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        self.run(z, 1.0)
    }
    /// Time reversal: the same scheme with -eps.
    fn inverse(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        self.run(z, -1.0)
    }
}

/// -log p(x) + ½ Σ inv_mass_i v_i².
pub fn hamiltonian(target: &dyn LogDensity, inv_mass: &[f64], z: &JointPoint) -> f64 {
    let kin: f64 = z.v.iter().zip(inv_mass).map(|(v, m)| 0.5 * m * v * v).sum();
    -target.log_density(&z.x) + kin
}
