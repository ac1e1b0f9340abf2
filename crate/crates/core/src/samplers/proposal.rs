//! Proposal densities q(to | from) on R^d, shared by the MH-style builders.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, RngExt};
use rand_distr::{Distribution, StandardNormal};

use crate::density::LogDensity;
use crate::kernel::AuxiliaryConditional;
use crate::point::JointPoint;

pub trait Proposal: Send + Sync {
    fn sample(&self, from: &[f64], rng: &mut dyn Rng) -> Vec<f64>;
    fn log_q(&self, to: &[f64], from: &[f64]) -> f64;
    /// Finite support, if any.
    fn support(&self, _from: &[f64]) -> Option<Vec<(Vec<f64>, f64)>> {
        None
    }
}

fn normal_logpdf(to: &[f64], mean: &[f64], var: f64) -> f64 {
    let q: f64 = to.iter().zip(mean).map(|(a, m)| (a - m).powi(2)).sum();
    -0.5 * q / var - 0.5 * to.len() as f64 * (2.0 * PI * var).ln()
}

/// Isotropic Gaussian random walk.
#[derive(Clone, Debug)]
pub struct GaussianRw {
    pub sd: f64,
}

impl Proposal for GaussianRw {
    fn sample(&self, from: &[f64], rng: &mut dyn Rng) -> Vec<f64> {
        from.iter()
            .map(|a| {
                let e: f64 = StandardNormal.sample(rng);
                a + self.sd * e
            })
            .collect()
    }
    fn log_q(&self, to: &[f64], from: &[f64]) -> f64 {
        normal_logpdf(to, from, self.sd * self.sd)
    }
}

/// Langevin proposal N(x + ε∇log p(x), 2ε).
#[derive(Clone)]
pub struct Langevin {
    pub target: Arc<dyn LogDensity>,
    pub eps: f64,
}

impl Langevin {
    fn mean(&self, from: &[f64]) -> Vec<f64> {
        let g = self.target.gradient(from).unwrap_or_else(|| vec![f64::NAN; from.len()]);
        from.iter().zip(&g).map(|(a, b)| a + self.eps * b).collect()
    }
}

impl Proposal for Langevin {
    fn sample(&self, from: &[f64], rng: &mut dyn Rng) -> Vec<f64> {
        let sd = (2.0 * self.eps).sqrt();
        self.mean(from)
            .into_iter()
            .map(|m| {
                let e: f64 = StandardNormal.sample(rng);
                m + sd * e
            })
            .collect()
    }
    fn log_q(&self, to: &[f64], from: &[f64]) -> f64 {
        normal_logpdf(to, &self.mean(from), 2.0 * self.eps)
    }
}

/// Row-stochastic matrix over the integer states 0..n of a 1D space.
#[derive(Clone, Debug)]
pub struct MatrixProposal {
    pub rows: Vec<Vec<f64>>,
}

impl MatrixProposal {
    fn row(&self, from: &[f64]) -> Option<&Vec<f64>> {
        let i = from[0];
        (i >= 0.0 && i.fract() == 0.0).then(|| self.rows.get(i as usize)).flatten()
    }
}

impl Proposal for MatrixProposal {
    fn sample(&self, from: &[f64], rng: &mut dyn Rng) -> Vec<f64> {
        let row = self.row(from).expect("state outside proposal matrix");
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (j, p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                return vec![j as f64];
            }
        }
        vec![row.iter().rposition(|p| *p > 0.0).unwrap_or(0) as f64]
    }
    fn log_q(&self, to: &[f64], from: &[f64]) -> f64 {
        let Some(row) = self.row(from) else { return f64::NEG_INFINITY };
        let j = to[0];
        if j < 0.0 || j.fract() != 0.0 {
            return f64::NEG_INFINITY;
        }
        row.get(j as usize).map(|p| p.ln()).unwrap_or(f64::NEG_INFINITY)
    }
    fn support(&self, from: &[f64]) -> Option<Vec<(Vec<f64>, f64)>> {
        let row = self.row(from)?;
        Some(row.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(j, p)| (vec![j as f64], *p)).collect())
    }
}

/// Independent proposal over a finite list of points.
#[derive(Clone, Debug)]
pub struct TableProposal {
    pub points: Vec<(Vec<f64>, f64)>,
}

impl Proposal for TableProposal {
    fn sample(&self, _from: &[f64], rng: &mut dyn Rng) -> Vec<f64> {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (p, w) in &self.points {
            acc += w;
            if u < acc {
                return p.clone();
            }
        }
        self.points.last().expect("empty table").0.clone()
    }
    fn log_q(&self, to: &[f64], _from: &[f64]) -> f64 {
        self.points.iter().filter(|(p, _)| p.as_slice() == to).map(|(_, w)| w).sum::<f64>().ln()
    }
    fn support(&self, _from: &[f64]) -> Option<Vec<(Vec<f64>, f64)>> {
        Some(self.points.clone())
    }
}

/// Where a `ProposalAux` reads its conditioning value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    X,
    /// v[start..start + dim]
    V(usize),
}

/// Writes v[dest..dest+dim] ~ q(· | source).
#[derive(Clone)]
pub struct ProposalAux {
    pub name: String,
    pub proposal: Arc<dyn Proposal>,
    pub source: Source,
    pub dest: usize,
    pub dim: usize,
}

impl ProposalAux {
    pub fn new(proposal: Arc<dyn Proposal>, source: Source, dest: usize, dim: usize) -> Self {
        Self { name: "proposal".into(), proposal, source, dest, dim }
    }

    fn from<'a>(&self, z: &'a JointPoint) -> &'a [f64] {
        match self.source {
            Source::X => &z.x,
            Source::V(s) => &z.v[s..s + self.dim],
        }
    }
}

impl AuxiliaryConditional for ProposalAux {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn Rng) {
        let y = self.proposal.sample(self.from(z), rng);
        z.v[self.dest..self.dest + self.dim].copy_from_slice(&y);
    }
    fn log_pdf(&self, z: &JointPoint) -> f64 {
        self.proposal.log_q(&z.v[self.dest..self.dest + self.dim], self.from(z))
    }
    fn enumerate(&self, z: &JointPoint) -> Option<Vec<(JointPoint, f64)>> {
        let s = self.proposal.support(self.from(z))?;
        Some(
            s.into_iter()
                .map(|(y, p)| {
                    let mut q = z.clone();
                    q.v[self.dest..self.dest + self.dim].copy_from_slice(&y);
                    (q, p)
                })
                .collect(),
        )
    }
}
