use std::sync::Arc;

use crate::density::{LogDensity, OnX, PointDensity};
use crate::error::{Error, Result};
use crate::kernel::{compose, AuxiliaryConditional, ImcmcKernel, KernelComposition, Transition};
use crate::maps::{DirectionAugment, FlipTag, FlowMap, Involution, Leapfrog, LeapfrogConfig, Swap};
use crate::point::{JointPoint, Layout, TagKind};

use super::conditionals::{DiscreteTag, GaussianBlock};

/// α used by the irreversible NICE sampler unless configured otherwise.
pub const DEFAULT_ALPHA: f64 = 0.8;

/// Rejects maps that report a nonzero log-Jacobian.
struct VolumeChecked(Arc<dyn Involution>);

impl Involution for VolumeChecked {
    fn name(&self) -> String {
        self.0.name()
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let (p, ld) = self.0.apply(z)?;
        if ld.abs() > 1e-12 {
            return Err(Error::Config(format!("`{}` declared volume-preserving but logdet = {ld}", self.0.name())));
        }
        Ok((p, ld))
    }
}

/// v refreshed from `momentum`, d uniform, involution (y, d) -> (T_d y, -d).
/// `volume_preserving` only asserts that every logdet is zero.
pub fn make_directional_map(
    target: Arc<dyn LogDensity>,
    momentum: Arc<dyn AuxiliaryConditional>,
    flow: Arc<dyn FlowMap>,
    volume_preserving: bool,
) -> ImcmcKernel {
    let d = target.dim();
    let mut f: Arc<dyn Involution> = Arc::new(DirectionAugment::new(flow, 0));
    if volume_preserving {
        f = Arc::new(VolumeChecked(f));
    }
    ImcmcKernel::new("directional", Arc::new(OnX(target)), f)
        .refresh(momentum)
        .refresh(Arc::new(DiscreteTag::direction(0)))
        .layout(Layout::new(d, d).tag("d", TagKind::Direction))
}

/// Shared layout of the persistent samplers: v = [momentum, refresh slot].
pub fn persistent_layout(d: usize) -> Layout {
    Layout::new(d, 2 * d).tag("d", TagKind::Direction)
}

/// Refresh kernel: a ~ p(a|v), swap v and a. Accepted with probability one
/// when p(v) p(a|v) is symmetric in (v, a).
pub fn refresh_kernel(
    target: Arc<dyn PointDensity>,
    d: usize,
    momentum: Arc<dyn AuxiliaryConditional>,
    refresh: Arc<dyn AuxiliaryConditional>,
) -> ImcmcKernel {
    ImcmcKernel::new("momentum refresh", target, Arc::new(Swap::v_v(d, d)))
        .persistent(momentum)
        .refresh(refresh)
        .layout(persistent_layout(d))
        .unit_acceptance()
}

/// Deterministic direction flip.
pub fn flip_kernel(target: Arc<dyn PointDensity>, layout: Layout) -> ImcmcKernel {
    ImcmcKernel::new("direction flip", target, Arc::new(FlipTag(0))).layout(layout)
}

/// Persistent-direction composition: partial refresh (skipped when `refresh`
/// is `None`), directional kernel with d carried over, direction flip. The
/// net effect keeps d after an accepted move and reverses it after a reject.
pub fn make_persistent(
    target: Arc<dyn LogDensity>,
    momentum: Arc<dyn AuxiliaryConditional>,
    refresh: Option<Arc<dyn AuxiliaryConditional>>,
    flow: Arc<dyn FlowMap>,
) -> Result<KernelComposition> {
    let d = target.dim();
    let on_x: Arc<dyn PointDensity> = Arc::new(OnX(target));
    let mut parts: Vec<Arc<dyn Transition>> = Vec::new();
    if let Some(r) = refresh {
        parts.push(Arc::new(refresh_kernel(on_x.clone(), d, momentum.clone(), r)));
    }
    parts.push(Arc::new(
        ImcmcKernel::new("directional", on_x.clone(), Arc::new(DirectionAugment::new(flow, 0)))
            .persistent(momentum)
            .layout(persistent_layout(d)),
    ));
    parts.push(Arc::new(flip_kernel(on_x, persistent_layout(d))));
    compose("persistent", parts)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Config(format!("alpha = {alpha} outside [0, 1]")));
    }
    Ok(())
}

fn gaussian_refresh(d: usize, alpha: f64) -> Option<Arc<dyn AuxiliaryConditional>> {
    (alpha > 0.0).then(|| Arc::new(GaussianBlock::autoregressive(d, alpha)) as Arc<dyn AuxiliaryConditional>)
}

/// Persistent-momentum HMC with the autoregressive refresh
/// v ← v √(1-α²) + α η and one leapfrog trajectory per step.
pub fn persistent_hmc(target: Arc<dyn LogDensity>, cfg: LeapfrogConfig, alpha: f64) -> Result<KernelComposition> {
    check_alpha(alpha)?;
    let d = target.dim();
    let flow = Arc::new(Leapfrog::new(target.clone(), cfg));
    make_persistent(target, Arc::new(GaussianBlock::momentum(d, 1.0)), gaussian_refresh(d, alpha), flow)
}

/// Irreversible NICE sampler: persistent composition around a fixed coupling map.
pub fn irr_nice_mc(target: Arc<dyn LogDensity>, flow: Arc<dyn FlowMap>, alpha: f64) -> Result<KernelComposition> {
    check_alpha(alpha)?;
    let d = target.dim();
    make_persistent(target, Arc::new(GaussianBlock::momentum(d, 1.0)), gaussian_refresh(d, alpha), flow)
}

/// NICE-style sampler: fully refreshed momentum and direction.
pub fn nice_mc(target: Arc<dyn LogDensity>, flow: Arc<dyn FlowMap>, volume_preserving: bool) -> ImcmcKernel {
    let d = target.dim();
    make_directional_map(target, Arc::new(GaussianBlock::momentum(d, 1.0)), flow, volume_preserving)
}
