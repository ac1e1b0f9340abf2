use std::sync::Arc;

use crate::density::{LogDensity, OnX, PointDensity};
use crate::error::{Error, Result};
use crate::kernel::{compose, AuxiliaryConditional, ImcmcKernel, Transition};
use crate::maps::{FlipTag, Involution, MixtureInvolution, Slot, Swap};
use crate::point::{JointPoint, Layout, TagKind};

use super::conditionals::{ByTag, DiscreteTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scan {
    Random,
    Systematic,
    /// Sweeps back and forth through the coordinates with a persistent direction.
    PersistentSystematic,
}

/// Coordinate update: v[0] ~ p(x_k | x_-k), then swap x_k and v[0].
pub fn coordinate_kernel(target: Arc<dyn PointDensity>, k: usize, cond: Arc<dyn AuxiliaryConditional>, d: usize) -> Result<ImcmcKernel> {
    Ok(ImcmcKernel::new(format!("gibbs {k}"), target, Arc::new(Swap::new(vec![(Slot::X(k), Slot::V(0))])?))
        .refresh(cond)
        .layout(Layout::new(d, 1))
        .unit_acceptance())
}

/// Tags (k, d). d = +1 updates coordinate k and moves to k+1, d = -1 updates
/// coordinate k-1 and moves to k-1; d is negated either way.
#[derive(Clone, Debug)]
pub struct SweepMove {
    pub n: usize,
}

impl SweepMove {
    pub fn coordinate(k: i64, d: i64, n: usize) -> usize {
        if d == 1 {
            k as usize
        } else {
            (k - 1).rem_euclid(n as i64) as usize
        }
    }
}

impl Involution for SweepMove {
    fn name(&self) -> String {
        "sweep".into()
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let (k, d) = (z.tags[0], z.tags[1]);
        if k < 0 || k as usize >= self.n || (d != 1 && d != -1) {
            return Err(Error::Layout("sweep tags".into()));
        }
        let c = Self::coordinate(k, d, self.n);
        let mut p = z.clone();
        p.x[c] = z.v[0];
        p.v[0] = z.x[c];
        p.tags[0] = (k + d).rem_euclid(self.n as i64);
        p.tags[1] = -d;
        Ok((p, 0.0))
    }
}

/// Gibbs sampling from exact full conditionals; `conditionals[k]` writes
/// v[0] ~ p(x_k | x_-k).
pub fn make_gibbs(
    target: Arc<dyn LogDensity>,
    conditionals: Vec<Arc<dyn AuxiliaryConditional>>,
    scan: Scan,
) -> Result<Arc<dyn Transition>> {
    let d = target.dim();
    if conditionals.len() != d {
        return Err(Error::Config(format!("{} conditionals for {d} coordinates", conditionals.len())));
    }
    let on_x: Arc<dyn PointDensity> = Arc::new(OnX(target));
    match scan {
        Scan::Systematic => {
            let mut parts: Vec<Arc<dyn Transition>> = Vec::new();
            for (k, c) in conditionals.into_iter().enumerate() {
                parts.push(Arc::new(coordinate_kernel(on_x.clone(), k, c, d)?));
            }
            Ok(Arc::new(compose("systematic gibbs", parts)?))
        }
        Scan::Random => {
            let family = (0..d)
                .map(|k| Ok(Arc::new(Swap::new(vec![(Slot::X(k), Slot::V(0))])?) as Arc<dyn Involution>))
                .collect::<Result<Vec<_>>>()?;
            Ok(Arc::new(
                ImcmcKernel::new("random gibbs", on_x, Arc::new(MixtureInvolution::new(0, family)?))
                    .refresh(Arc::new(DiscreteTag::uniform_index("coordinate", 0, d)))
                    .refresh(Arc::new(ByTag { tag: 0, members: conditionals }))
                    .layout(Layout::new(d, 1).tag("k", TagKind::Index))
                    .unit_acceptance(),
            ))
        }
        Scan::PersistentSystematic => {
            let layout = Layout::new(d, 1).tag("k", TagKind::Index).tag("d", TagKind::Direction);
            let cond = SweepConditional { members: conditionals, n: d };
            let t1 = ImcmcKernel::new("sweep gibbs", on_x.clone(), Arc::new(SweepMove { n: d }))
                .refresh(Arc::new(cond))
                .layout(layout.clone())
                .unit_acceptance();
            let t2 = ImcmcKernel::new("direction flip", on_x, Arc::new(FlipTag(1))).layout(layout);
            Ok(Arc::new(compose("persistent gibbs", vec![Arc::new(t1), Arc::new(t2)])?))
        }
    }
}

/// Conditional of the coordinate selected by the sweep tags.
struct SweepConditional {
    members: Vec<Arc<dyn AuxiliaryConditional>>,
    n: usize,
}

impl SweepConditional {
    fn member(&self, z: &JointPoint) -> &Arc<dyn AuxiliaryConditional> {
        &self.members[SweepMove::coordinate(z.tags[0], z.tags[1], self.n)]
    }
}

impl AuxiliaryConditional for SweepConditional {
    fn name(&self) -> String {
        "sweep conditional".into()
    }
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn rand::Rng) {
        self.member(z).clone().sample(z, rng)
    }
    fn log_pdf(&self, z: &JointPoint) -> f64 {
        self.member(z).log_pdf(z)
    }
    fn enumerate(&self, z: &JointPoint) -> Option<Vec<(JointPoint, f64)>> {
        self.member(z).enumerate(z)
    }
}
