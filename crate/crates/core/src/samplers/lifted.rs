use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::density::{LogDensity, OnX, PointDensity};
use crate::error::{Error, Result};
use crate::kernel::{compose, AuxiliaryConditional, ImcmcKernel, KernelComposition};
use crate::maps::{FlipTag, Involution, Product, Swap};
use crate::point::{JointPoint, Layout, TagKind};
use crate::targets::TableTarget;

use super::conditionals::DiscreteSlot;

/// Direction-split kernels (T⁺, T⁻) of a row-stochastic base matrix. Ties
/// η(y) = η(x) go to both halves; diagonals absorb the remaining mass.
pub fn split_base(base: &[Vec<f64>], eta: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n = base.len();
    if eta.len() != n {
        return Err(Error::Config("eta must have one value per state".into()));
    }
    for (i, r) in base.iter().enumerate() {
        let s: f64 = r.iter().sum();
        if r.len() != n || r.iter().any(|a| *a < 0.0 || !a.is_finite()) || (s - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("base kernel row {i} is not a probability vector")));
        }
    }
    let mut plus = vec![vec![0.0; n]; n];
    let mut minus = vec![vec![0.0; n]; n];
    for x in 0..n {
        for y in 0..n {
            if y == x {
                continue;
            }
            if eta[y] >= eta[x] {
                plus[x][y] = base[x][y];
            }
            if eta[y] <= eta[x] {
                minus[x][y] = base[x][y];
            }
        }
        plus[x][x] = 1.0 - plus[x].iter().sum::<f64>();
        minus[x][x] = 1.0 - minus[x].iter().sum::<f64>();
    }
    Ok((plus, minus))
}

/// The lifted kernel written out directly: states (x, +) for x < n, then
/// (x, -).
pub fn lifted_matrix(base: &[Vec<f64>], eta: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = base.len();
    let (plus, minus) = split_base(base, eta)?;
    let off = |m: &Vec<Vec<f64>>, x: usize| -> f64 { (0..n).filter(|&y| y != x).map(|y| m[x][y]).sum() };
    let mut t = vec![vec![0.0; 2 * n]; 2 * n];
    for x in 0..n {
        let (sp, sm) = (off(&plus, x), off(&minus, x));
        for y in 0..n {
            if y != x {
                t[x][y] = plus[x][y];
                t[n + x][n + y] = minus[x][y];
            }
        }
        let stay = (1.0 - sm).min(1.0 - sp);
        t[x][x] = stay;
        t[n + x][n + x] = stay;
        t[x][n + x] = (sm - sp).max(0.0);
        t[n + x][x] = (sp - sm).max(0.0);
    }
    Ok(t)
}

/// Lifted MH on states 0..n of `p`: v ~ T^(d)(x, ·), (x, v, d) -> (v, x, -d),
/// then the direction flip. `base` must be reversible with respect to `p`.
pub fn make_lifted(p: &[f64], base: &[Vec<f64>], eta: &[f64]) -> Result<KernelComposition> {
    if base.len() != p.len() {
        return Err(Error::Config("base kernel and target sizes differ".into()));
    }
    let (plus, minus) = split_base(base, eta)?;
    let target: Arc<dyn LogDensity> = Arc::new(TableTarget::new_1d(p.to_vec())?);
    let on_x: Arc<dyn PointDensity> = Arc::new(OnX(target));
    let q = DiscreteSlot::new("split proposal", crate::maps::Slot::V(0), move |z: &JointPoint| {
        let x = z.x[0] as usize;
        let row = if z.tags[0] == 1 { &plus[x] } else { &minus[x] };
        row.iter().enumerate().filter(|(_, w)| **w > 0.0).map(|(y, w)| (y as f64, *w)).collect()
    });
    let f: Vec<Arc<dyn Involution>> = vec![Arc::new(Swap::x_v(1, 0)), Arc::new(FlipTag(0))];
    let layout = Layout::new(1, 1).tag("d", TagKind::Direction);
    let t1 = ImcmcKernel::new("lifted move", on_x.clone(), Arc::new(Product(f)))
        .refresh(Arc::new(q))
        .layout(layout.clone());
    let t2 = ImcmcKernel::new("direction flip", on_x, Arc::new(FlipTag(0))).layout(layout);
    compose("lifted mh", vec![Arc::new(t1), Arc::new(t2)])
}

/// v = x + d |ξ|, ξ ~ N(0, sd²): the 1D split proposal on R.
#[derive(Clone, Debug)]
pub struct HalfNormalStep {
    pub sd: f64,
}

impl AuxiliaryConditional for HalfNormalStep {
    fn name(&self) -> String {
        "half-normal step".into()
    }
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn Rng) {
        let e: f64 = StandardNormal.sample(rng);
        z.v[0] = z.x[0] + z.tags[0] as f64 * self.sd * e.abs();
    }
    fn log_pdf(&self, z: &JointPoint) -> f64 {
        let s = (z.v[0] - z.x[0]) * z.tags[0] as f64;
        if s < 0.0 {
            return f64::NEG_INFINITY;
        }
        let u = s / self.sd;
        2f64.ln() - 0.5 * u * u - (self.sd * (2.0 * PI).sqrt()).ln()
    }
}

/// Guided random walk on R: split proposal, swap with direction negation,
/// then the flip.
pub fn guided_walk(target: Arc<dyn LogDensity>, sd: f64) -> Result<KernelComposition> {
    if target.dim() != 1 {
        return Err(Error::Config("guided walk is one-dimensional".into()));
    }
    let on_x: Arc<dyn PointDensity> = Arc::new(OnX(target));
    let layout = Layout::new(1, 1).tag("d", TagKind::Direction);
    let f: Vec<Arc<dyn Involution>> = vec![Arc::new(Swap::x_v(1, 0)), Arc::new(FlipTag(0))];
    let t1 = ImcmcKernel::new("guided move", on_x.clone(), Arc::new(Product(f)))
        .refresh(Arc::new(HalfNormalStep { sd }))
        .layout(layout.clone());
    let t2 = ImcmcKernel::new("direction flip", on_x, Arc::new(FlipTag(0))).layout(layout);
    compose("guided walk", vec![Arc::new(t1), Arc::new(t2)])
}
