//! Reusable auxiliary conditionals.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngExt};
use rand_distr::{Distribution, StandardNormal};

use crate::kernel::AuxiliaryConditional;
use crate::maps::{Metric, Slot};
use crate::point::JointPoint;

type SlotSupport = dyn Fn(&JointPoint) -> Vec<(f64, f64)> + Send + Sync;
type TagSupport = dyn Fn(&JointPoint) -> Vec<(i64, f64)> + Send + Sync;
type MeanFn = dyn Fn(&JointPoint) -> Vec<f64> + Send + Sync;
type ScaleFn = dyn Fn(&JointPoint) -> f64 + Send + Sync;

fn pick<T: Copy>(support: &[(T, f64)], rng: &mut dyn Rng) -> T {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for &(a, p) in support {
        acc += p;
        if u < acc {
            return a;
        }
    }
    support.iter().rev().find(|(_, p)| *p > 0.0).map(|s| s.0).expect("empty support")
}

fn slot_mut(z: &mut JointPoint, s: Slot) -> &mut f64 {
    match s {
        Slot::X(i) => &mut z.x[i],
        Slot::V(i) => &mut z.v[i],
    }
}

fn slot_get(z: &JointPoint, s: Slot) -> Option<f64> {
    match s {
        Slot::X(i) => z.x.get(i).copied(),
        Slot::V(i) => z.v.get(i).copied(),
    }
}

/// One continuous slot with a finite, state-dependent support.
#[derive(Clone)]
pub struct DiscreteSlot {
    name: String,
    slot: Slot,
    support: Arc<SlotSupport>,
}

impl DiscreteSlot {
    pub fn new(
        name: impl Into<String>,
        slot: Slot,
        support: impl Fn(&JointPoint) -> Vec<(f64, f64)> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), slot, support: Arc::new(support) }
    }
}

impl AuxiliaryConditional for DiscreteSlot {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn Rng) {
        let s = (self.support)(z);
        *slot_mut(z, self.slot) = pick(&s, rng);
    }
    fn log_pdf(&self, z: &JointPoint) -> f64 {
        let Some(a) = slot_get(z, self.slot) else { return f64::NEG_INFINITY };
        let p: f64 = (self.support)(z).iter().filter(|(b, _)| *b == a).map(|(_, p)| p).sum();
        p.ln()
    }
    fn enumerate(&self, z: &JointPoint) -> Option<Vec<(JointPoint, f64)>> {
        Some(
            (self.support)(z)
                .into_iter()
                .map(|(a, p)| {
                    let mut q = z.clone();
                    *slot_mut(&mut q, self.slot) = a;
                    (q, p)
                })
                .collect(),
        )
    }
}

/// A discrete tag with a finite, state-dependent support.
#[derive(Clone)]
pub struct DiscreteTag {
    name: String,
    tag: usize,
    support: Arc<TagSupport>,
}

impl DiscreteTag {
    pub fn new(
        name: impl Into<String>,
        tag: usize,
        support: impl Fn(&JointPoint) -> Vec<(i64, f64)> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), tag, support: Arc::new(support) }
    }

    /// Uniform over {-1, +1}.
    pub fn direction(tag: usize) -> Self {
        Self::new("direction", tag, |_| vec![(1, 0.5), (-1, 0.5)])
    }

    /// Uniform over 0..n.
    pub fn uniform_index(name: impl Into<String>, tag: usize, n: usize) -> Self {
        let p = 1.0 / n as f64;
        Self::new(name, tag, move |_| (0..n as i64).map(|i| (i, p)).collect())
    }
}

impl AuxiliaryConditional for DiscreteTag {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn Rng) {
        let s = (self.support)(z);
        z.tags[self.tag] = pick(&s, rng);
    }
    fn log_pdf(&self, z: &JointPoint) -> f64 {
        let Some(&a) = z.tags.get(self.tag) else { return f64::NEG_INFINITY };
        let p: f64 = (self.support)(z).iter().filter(|(b, _)| *b == a).map(|(_, p)| p).sum();
        p.ln()
    }
    fn enumerate(&self, z: &JointPoint) -> Option<Vec<(JointPoint, f64)>> {
        Some(
            (self.support)(z)
                .into_iter()
                .map(|(a, p)| {
                    let mut q = z.clone();
                    q.tags[self.tag] = a;
                    (q, p)
                })
                .collect(),
        )
    }
}

/// v[start..start+len] ~ N(mean(z), sd(z)² I).
#[derive(Clone)]
pub struct GaussianBlock {
    name: String,
    start: usize,
    len: usize,
    mean: Arc<MeanFn>,
    sd: Arc<ScaleFn>,
}

impl GaussianBlock {
    pub fn new(
        name: impl Into<String>,
        start: usize,
        len: usize,
        mean: impl Fn(&JointPoint) -> Vec<f64> + Send + Sync + 'static,
        sd: impl Fn(&JointPoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), start, len, mean: Arc::new(mean), sd: Arc::new(sd) }
    }

    /// N(0, sd² I) momentum in v[..len].
    pub fn momentum(len: usize, sd: f64) -> Self {
        Self::new("momentum", 0, len, move |_| vec![0.0; len], move |_| sd)
    }

    /// Autoregressive refresh into v[len..2 len]: a = v √(1-α²) + α η.
    pub fn autoregressive(len: usize, alpha: f64) -> Self {
        let c = (1.0 - alpha * alpha).max(0.0).sqrt();
        Self::new("ar refresh", len, len, move |z| z.v[..len].iter().map(|a| a * c).collect(), move |_| alpha)
    }
}

impl AuxiliaryConditional for GaussianBlock {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn Rng) {
        let m = (self.mean)(z);
        let sd = (self.sd)(z);
        if z.v.len() < self.start + self.len {
            z.v.resize(self.start + self.len, 0.0);
        }
        for i in 0..self.len {
            let e: f64 = StandardNormal.sample(rng);
            z.v[self.start + i] = m[i] + sd * e;
        }
    }
    fn log_pdf(&self, z: &JointPoint) -> f64 {
        if z.v.len() < self.start + self.len {
            return f64::NEG_INFINITY;
        }
        let m = (self.mean)(z);
        let sd = (self.sd)(z);
        let q: f64 = (0..self.len).map(|i| ((z.v[self.start + i] - m[i]) / sd).powi(2)).sum();
        -0.5 * q - self.len as f64 * (sd.ln() + 0.5 * (2.0 * PI).ln())
    }
}

/// Selects one of several conditionals by the value of an index tag.
#[derive(Clone)]
pub struct ByTag {
    pub tag: usize,
    pub members: Vec<Arc<dyn AuxiliaryConditional>>,
}

impl ByTag {
    fn member(&self, z: &JointPoint) -> Option<&Arc<dyn AuxiliaryConditional>> {
        z.tags.get(self.tag).and_then(|&k| usize::try_from(k).ok()).and_then(|k| self.members.get(k))
    }
}

impl AuxiliaryConditional for ByTag {
    fn name(&self) -> String {
        "by tag".into()
    }
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn Rng) {
        if let Some(m) = self.member(z).cloned() {
            m.sample(z, rng);
        }
    }
    fn log_pdf(&self, z: &JointPoint) -> f64 {
        self.member(z).map(|m| m.log_pdf(z)).unwrap_or(f64::NEG_INFINITY)
    }
    fn enumerate(&self, z: &JointPoint) -> Option<Vec<(JointPoint, f64)>> {
        self.member(z)?.enumerate(z)
    }
}

/// v[..d] ~ N(0, G(x)).
#[derive(Clone)]
pub struct MetricMomentum {
    pub metric: Arc<dyn Metric>,
}

impl AuxiliaryConditional for MetricMomentum {
    fn name(&self) -> String {
        "metric momentum".into()
    }
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn Rng) {
        let d = z.x.len();
        let g = self.metric.g(&z.x);
        let l = g.cholesky().expect("metric must be positive definite").l();
        let e = DVector::from_fn(d, |_, _| StandardNormal.sample(rng));
        let v = l * e;
        z.v.resize(d.max(z.v.len()), 0.0);
        z.v[..d].copy_from_slice(v.as_slice());
    }
    fn log_pdf(&self, z: &JointPoint) -> f64 {
        let d = z.x.len();
        let g: DMatrix<f64> = self.metric.g(&z.x);
        let Some(ch) = g.cholesky() else { return f64::NAN };
        let v = DVector::from_column_slice(&z.v[..d]);
        let w = ch.solve(&v);
        let logdet = 2.0 * ch.l().diagonal().iter().map(|a| a.ln()).sum::<f64>();
        -0.5 * v.dot(&w) - 0.5 * logdet - 0.5 * d as f64 * (2.0 * PI).ln()
    }
}
