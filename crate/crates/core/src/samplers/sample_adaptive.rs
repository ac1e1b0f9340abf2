use std::sync::Arc;

use rand::{Rng, RngExt};

use crate::density::{LogDensity, PointDensity};
use crate::error::{Error, Result};
use crate::kernel::{AuxiliaryConditional, ImcmcKernel};
use crate::maps::Involution;
use crate::point::{JointPoint, Layout, TagKind};

use super::proposal::Proposal;

/// Aggregation g of the ordered sample array (elements of equal length).
pub type Aggregate = Arc<dyn Fn(&[&[f64]]) -> Vec<f64> + Send + Sync>;

/// Product of one element density over the concatenated sample array.
pub struct ProductDensity {
    pub elem: Arc<dyn LogDensity>,
    pub n: usize,
}

impl PointDensity for ProductDensity {
    fn log_density(&self, z: &JointPoint) -> f64 {
        let d = self.elem.dim();
        if z.x.len() != d * self.n {
            return f64::NAN;
        }
        z.x.chunks(d).map(|c| self.elem.log_density(c)).sum()
    }
}

struct Shared {
    elem: Arc<dyn LogDensity>,
    q: Arc<dyn Proposal>,
    g: Aggregate,
    n: usize,
}

impl Shared {
    fn d(&self) -> usize {
        self.elem.dim()
    }

    fn agg(&self, x: &[f64], replace: Option<(usize, &[f64])>) -> Vec<f64> {
        let d = self.d();
        let parts: Vec<&[f64]> = (0..self.n)
            .map(|i| match replace {
                Some((r, y)) if r == i => y,
                _ => &x[i * d..(i + 1) * d],
            })
            .collect();
        (self.g)(&parts)
    }

    /// Selection probabilities over 0..=n; index n keeps the array.
    fn probs(&self, z: &JointPoint) -> Vec<f64> {
        let d = self.d();
        let v = &z.v[..d];
        let mut lw: Vec<f64> = (0..self.n)
            .map(|i| {
                let xi = &z.x[i * d..(i + 1) * d];
                self.q.log_q(xi, &self.agg(&z.x, Some((i, v)))) - self.elem.log_density(xi)
            })
            .collect();
        lw.push(self.q.log_q(v, &self.agg(&z.x, None)) - self.elem.log_density(v));
        let m = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !m.is_finite() {
            return vec![f64::NAN; self.n + 1];
        }
        let w: Vec<f64> = lw.iter().map(|a| (a - m).exp()).collect();
        let t: f64 = w.iter().sum();
        w.into_iter().map(|a| a / t).collect()
    }
}

struct NewSample(Arc<Shared>);

impl AuxiliaryConditional for NewSample {
    fn name(&self) -> String {
        "new sample".into()
    }
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn Rng) {
        let y = self.0.q.sample(&self.0.agg(&z.x, None), rng);
        z.v.copy_from_slice(&y);
    }
    fn log_pdf(&self, z: &JointPoint) -> f64 {
        self.0.q.log_q(&z.v, &self.0.agg(&z.x, None))
    }
    fn enumerate(&self, z: &JointPoint) -> Option<Vec<(JointPoint, f64)>> {
        let s = self.0.q.support(&self.0.agg(&z.x, None))?;
        Some(s.into_iter().map(|(y, p)| (z.clone().with_v(y), p)).collect())
    }
}

struct Replaced(Arc<Shared>);

impl AuxiliaryConditional for Replaced {
    fn name(&self) -> String {
        "replaced index".into()
    }
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn Rng) {
        let p = self.0.probs(z);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut j = self.0.n;
        for (i, pi) in p.iter().enumerate() {
            acc += pi;
            if u < acc {
                j = i;
                break;
            }
        }
        z.tags[0] = j as i64;
    }
    fn log_pdf(&self, z: &JointPoint) -> f64 {
        let j = z.tags[0];
        if j < 0 || j as usize > self.0.n {
            return f64::NEG_INFINITY;
        }
        self.0.probs(z)[j as usize].ln()
    }
    fn enumerate(&self, z: &JointPoint) -> Option<Vec<(JointPoint, f64)>> {
        Some(
            self.0
                .probs(z)
                .into_iter()
                .enumerate()
                .map(|(j, p)| {
                    let mut q = z.clone();
                    q.tags[0] = j as i64;
                    (q, p)
                })
                .collect(),
        )
    }
}

/// Swaps element j of the array with the new sample; j = N is the identity.
#[derive(Clone, Debug)]
pub struct ElementSwap {
    pub n: usize,
    pub d: usize,
}

impl Involution for ElementSwap {
    fn name(&self) -> String {
        "element swap".into()
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let j = usize::try_from(z.tags[0]).ok().filter(|j| *j <= self.n).ok_or_else(|| Error::Layout("replaced index".into()))?;
        let mut p = z.clone();
        if j < self.n {
            let d = self.d;
            p.x[j * d..(j + 1) * d].copy_from_slice(&z.v);
            p.v.copy_from_slice(&z.x[j * d..(j + 1) * d]);
        }
        Ok((p, 0.0))
    }
}

/// Sample-adaptive MCMC over an array of `n` samples. With a permutation
/// invariant `g` every swap is accepted; `generalized` drops that assumption
/// and applies the usual ratio.
pub fn make_sample_adaptive(
    elem: Arc<dyn LogDensity>,
    n: usize,
    q: Arc<dyn Proposal>,
    g: Aggregate,
    generalized: bool,
) -> Result<ImcmcKernel> {
    if n == 0 {
        return Err(Error::Config("sample-adaptive needs N >= 1".into()));
    }
    let d = elem.dim();
    let shared = Arc::new(Shared { elem: elem.clone(), q, g, n });
    let k = ImcmcKernel::new(
        if generalized { "generalized sample-adaptive" } else { "sample-adaptive" },
        Arc::new(ProductDensity { elem, n }),
        Arc::new(ElementSwap { n, d }),
    )
    .refresh(Arc::new(NewSample(shared.clone())))
    .refresh(Arc::new(Replaced(shared)))
    .layout(Layout::new(n * d, d).tag("j", TagKind::Index));
    Ok(if generalized { k } else { k.unit_acceptance() })
}

/// Componentwise mean, a permutation-invariant aggregate.
pub fn mean_aggregate() -> Aggregate {
    Arc::new(|parts: &[&[f64]]| {
        let d = parts[0].len();
        (0..d).map(|i| parts.iter().map(|p| p[i]).sum::<f64>() / parts.len() as f64).collect()
    })
}
