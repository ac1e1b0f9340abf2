use std::sync::Arc;

use rand::{Rng, RngExt};

use crate::density::{LogDensity, OnX};
use crate::error::{Error, Result};
use crate::kernel::{AuxiliaryConditional, ImcmcKernel};
use crate::maps::Involution;
use crate::point::{JointPoint, Layout, TagKind};

use super::proposal::{Proposal, ProposalAux, Source};

/// Symmetric weight factor λ(x, y).
pub type Lambda = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

fn logsumexp(a: &[f64]) -> f64 {
    let m = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + a.iter().map(|b| (b - m).exp()).sum::<f64>().ln()
}

/// log w(x, y) = log p(y) + log q(x|y) + log λ(x, y)
struct Weights {
    target: Arc<dyn LogDensity>,
    q: Arc<dyn Proposal>,
    lambda: Option<Lambda>,
}

impl Weights {
    fn log_w(&self, x: &[f64], y: &[f64]) -> f64 {
        let l = self.lambda.as_ref().map(|f| f(x, y).ln()).unwrap_or(0.0);
        self.target.log_density(y) + self.q.log_q(x, y) + l
    }
}

/// Selection tag j ∝ w(x, y_j), uniform when every weight vanishes.
struct TrialIndex {
    w: Weights,
    k: usize,
    d: usize,
}

impl TrialIndex {
    fn probs(&self, z: &JointPoint) -> Vec<f64> {
        let lw: Vec<f64> = (0..self.k).map(|i| self.w.log_w(&z.x, &z.v[i * self.d..(i + 1) * self.d])).collect();
        let t = logsumexp(&lw);
        if t == f64::NEG_INFINITY || t.is_nan() {
            return vec![1.0 / self.k as f64; self.k];
        }
        lw.iter().map(|a| (a - t).exp()).collect()
    }
}

impl AuxiliaryConditional for TrialIndex {
    fn name(&self) -> String {
        "trial index".into()
    }
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn Rng) {
        let p = self.probs(z);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut j = self.k - 1;
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
        if j < 0 || j as usize >= self.k {
            return f64::NEG_INFINITY;
        }
        self.probs(z)[j as usize].ln()
    }
    fn enumerate(&self, z: &JointPoint) -> Option<Vec<(JointPoint, f64)>> {
        Some(
            self.probs(z)
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

/// Reference point i ~ q(·|y_j), stored after the trials.
struct Reference {
    q: Arc<dyn Proposal>,
    i: usize,
    k: usize,
    d: usize,
}

impl Reference {
    fn inner(&self, z: &JointPoint) -> ProposalAux {
        let j = z.tags[0] as usize;
        ProposalAux::new(self.q.clone(), Source::V(j * self.d), (self.k + self.i) * self.d, self.d)
    }
}

impl AuxiliaryConditional for Reference {
    fn name(&self) -> String {
        format!("reference {}", self.i)
    }
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn Rng) {
        self.inner(z).sample(z, rng)
    }
    fn log_pdf(&self, z: &JointPoint) -> f64 {
        self.inner(z).log_pdf(z)
    }
    fn enumerate(&self, z: &JointPoint) -> Option<Vec<(JointPoint, f64)>> {
        self.inner(z).enumerate(z)
    }
}

/// x <-> y_j, and the other trials <-> the reference points in order.
#[derive(Clone, Debug)]
pub struct TrialSwap {
    pub k: usize,
    pub d: usize,
}

impl Involution for TrialSwap {
    fn name(&self) -> String {
        "trial swap".into()
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let (k, d) = (self.k, self.d);
        let j = usize::try_from(z.tags[0]).ok().filter(|j| *j < k).ok_or_else(|| Error::Layout("trial index".into()))?;
        if z.v.len() != (2 * k - 1) * d || z.x.len() != d {
            return Err(Error::Layout("multiple-try block sizes".into()));
        }
        let mut p = z.clone();
        p.x.copy_from_slice(&z.v[j * d..(j + 1) * d]);
        p.v[j * d..(j + 1) * d].copy_from_slice(&z.x);
        let others = (0..k).filter(|&i| i != j);
        for (r, i) in others.enumerate() {
            let ref_at = (k + r) * d;
            p.v[i * d..(i + 1) * d].copy_from_slice(&z.v[ref_at..ref_at + d]);
            p.v[ref_at..ref_at + d].copy_from_slice(&z.v[i * d..(i + 1) * d]);
        }
        Ok((p, 0.0))
    }
}

/// Multiple-try Metropolis with k trials. `lambda` defaults to 1.
pub fn make_multiple_try(
    target: Arc<dyn LogDensity>,
    q: Arc<dyn Proposal>,
    lambda: Option<Lambda>,
    k: usize,
) -> Result<ImcmcKernel> {
    if k == 0 {
        return Err(Error::Config("multiple-try needs k >= 1".into()));
    }
    let d = target.dim();
    let mut kernel = ImcmcKernel::new("mtm", Arc::new(OnX(target.clone())), Arc::new(TrialSwap { k, d }))
        .layout(Layout::new(d, (2 * k - 1) * d).tag("j", TagKind::Index));
    for i in 0..k {
        let mut a = ProposalAux::new(q.clone(), Source::X, i * d, d);
        a.name = format!("trial {i}");
        kernel = kernel.refresh(Arc::new(a));
    }
    kernel = kernel.refresh(Arc::new(TrialIndex { w: Weights { target, q: q.clone(), lambda }, k, d }));
    for i in 0..k - 1 {
        kernel = kernel.refresh(Arc::new(Reference { q: q.clone(), i, k, d }));
    }
    Ok(kernel)
}
