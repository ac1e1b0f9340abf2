use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::point::JointPoint;

use super::{FlowMap, LeapfrogConfig};

/// Position-dependent mass matrix G(x).
pub trait Metric: Send + Sync {
    fn dim(&self) -> usize;
    fn g(&self, x: &[f64]) -> DMatrix<f64>;
    /// ∂G/∂x_i for each coordinate i.
    fn dg(&self, x: &[f64]) -> Vec<DMatrix<f64>>;
}

#[derive(Clone, Debug)]
pub struct ConstantMetric(pub DMatrix<f64>);

impl ConstantMetric {
    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        Self(DMatrix::identity(dim, dim) * c)
    }
}

impl Metric for ConstantMetric {
    fn dim(&self) -> usize {
        self.0.nrows()
    }
    fn g(&self, _x: &[f64]) -> DMatrix<f64> {
        self.0.clone()
    }
    fn dg(&self, _x: &[f64]) -> Vec<DMatrix<f64>> {
        vec![DMatrix::zeros(self.0.nrows(), self.0.ncols()); self.0.nrows()]
    }
}

type MatFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;
type MatGradFn = dyn Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync;

pub struct FnMetric {
    dim: usize,
    g: Box<MatFn>,
    dg: Box<MatGradFn>,
}

impl FnMetric {
    pub fn new(
        dim: usize,
        g: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
        dg: impl Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync + 'static,
    ) -> Self {
        Self { dim, g: Box::new(g), dg: Box::new(dg) }
    }
}

impl Metric for FnMetric {
    fn dim(&self) -> usize {
        self.dim
    }
    fn g(&self, x: &[f64]) -> DMatrix<f64> {
        (self.g)(x)
    }
    fn dg(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        (self.dg)(x)
    }
}

fn cholesky(g: DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(g).ok_or_else(|| Error::InvalidDensity("metric is not positive definite".into()))
}

/// Generalized (implicit) leapfrog for
/// H(x, v) = -log p(x) + ½ log|G(x)| + ½ vᵀ G(x)⁻¹ v, solved by plain
/// fixed-point iteration.
#[derive(Clone)]
pub struct ImplicitLeapfrog {
    pub target: Arc<dyn LogDensity>,
    pub metric: Arc<dyn Metric>,
    pub cfg: LeapfrogConfig,
    pub tol: f64,
    pub max_iter: usize,
}

impl ImplicitLeapfrog {
    pub fn new(target: Arc<dyn LogDensity>, metric: Arc<dyn Metric>, cfg: LeapfrogConfig) -> Self {
        Self { target, metric, cfg, tol: 1e-12, max_iter: 100 }
    }

    pub fn hamiltonian(&self, z: &JointPoint) -> Result<f64> {
        let d = z.x.len();
        let ch = cholesky(self.metric.g(&z.x))?;
        let v = DVector::from_column_slice(&z.v[..d]);
        let u = ch.solve(&v);
        let logdet = 2.0 * ch.l().diagonal().iter().map(|a| a.ln()).sum::<f64>();
        Ok(-self.target.log_density(&z.x) + 0.5 * logdet + 0.5 * v.dot(&u))
    }

    fn dh_dx(&self, x: &[f64], p: &DVector<f64>) -> Result<DVector<f64>> {
        let ch = cholesky(self.metric.g(x))?;
        let ginv = ch.inverse();
        let u = &ginv * p;
        let grad = self.target.gradient(x).ok_or_else(|| Error::Config("implicit leapfrog needs a gradient".into()))?;
        let dg = self.metric.dg(x);
        let mut out = DVector::zeros(x.len());
        for i in 0..x.len() {
            let tr = (&ginv * &dg[i]).trace();
            out[i] = -grad[i] + 0.5 * tr - 0.5 * u.dot(&(&dg[i] * &u));
        }
        if out.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFiniteGradient(x.to_vec()));
        }
        Ok(out)
    }

    fn dh_dv(&self, x: &[f64], p: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(cholesky(self.metric.g(x))?.solve(p))
    }

    /// Iterates c ← F(c) from F(init); returns the solution and the number
    /// of applications i at which ‖F(cᵢ) − cᵢ‖∞ ≤ tol.
    fn fixed_point(
        &self,
        init: DVector<f64>,
        f: impl Fn(&DVector<f64>) -> Result<DVector<f64>>,
    ) -> Result<(DVector<f64>, usize)> {
        let mut cand = f(&init)?;
        for i in 1..=self.max_iter {
            let next = f(&cand)?;
            let res = (&next - &cand).amax();
            if res <= self.tol {
                return Ok((next, i));
            }
            if i == self.max_iter {
                return Err(Error::NoConvergence { residual: res, iterations: i });
            }
            cand = next;
        }
        unreachable!()
    }

    fn one_step(&self, x: &[f64], p: &DVector<f64>, h: f64) -> Result<(Vec<f64>, DVector<f64>, usize)> {
        let (ph, n1) = self.fixed_point(p.clone(), |c| Ok(p - self.dh_dx(x, c)? * (0.5 * h)))?;
        let ux = self.dh_dv(x, &ph)?;
        let x0 = DVector::from_column_slice(x);
        let (xn, n2) = self.fixed_point(x0.clone(), |c| {
            let uc = self.dh_dv(c.as_slice(), &ph)?;
            Ok(&x0 + (&ux + uc) * (0.5 * h))
        })?;
        let xn: Vec<f64> = xn.iter().copied().collect();
        let pn = &ph - self.dh_dx(&xn, &ph)? * (0.5 * h);
        Ok((xn, pn, n1.max(n2)))
    }

    /// k steps forward; also returns the largest fixed-point iteration count.
    pub fn integrate(&self, z: &JointPoint) -> Result<(JointPoint, usize)> {
        let d = z.x.len();
        if z.v.len() < d || self.metric.dim() != d {
            return Err(Error::Layout("implicit leapfrog: dimension mismatch".into()));
        }
        let mut x = z.x.clone();
        let mut p = DVector::from_column_slice(&z.v[..d]);
        let mut iters = 0;
        for _ in 0..self.cfg.k {
            let (xn, pn, n) = self.one_step(&x, &p, self.cfg.eps)?;
            x = xn;
            p = pn;
            iters = iters.max(n);
        }
        let mut out = z.clone();
        out.x = x;
        out.v[..d].copy_from_slice(p.as_slice());
        Ok((out, iters))
    }
}

impl FlowMap for ImplicitLeapfrog {
    fn name(&self) -> String {
        format!("implicit-leapfrog(eps={}, k={})", self.cfg.eps, self.cfg.k)
    }
    fn forward(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        Ok((self.integrate(z)?.0, 0.0))
    }
    /// F L F: the scheme is symmetric, so reversing time is a momentum flip
    /// on both ends.
    fn inverse(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let d = z.x.len();
        let mut w = z.clone();
        w.v[..d].iter_mut().for_each(|a| *a = -*a);
        let (mut out, _) = self.integrate(&w)?;
        out.v[..d].iter_mut().for_each(|a| *a = -*a);
        Ok((out, 0.0))
    }
}
