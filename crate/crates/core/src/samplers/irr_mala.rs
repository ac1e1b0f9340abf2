use std::sync::Arc;

use crate::density::{LogDensity, OnX, PointDensity};
use crate::error::{Error, Result};
use crate::kernel::{compose, AuxiliaryConditional, ImcmcKernel, KernelComposition};
use crate::maps::{FlipTag, IrrMalaMap};
use crate::point::{Layout, TagKind};

use super::conditionals::GaussianBlock;

/// Irreversible MALA with an arbitrary direction-dependent proposal
/// q(v | x, d) writing v[..dim].
pub fn make_irr_mala_with(target: Arc<dyn LogDensity>, proposal: Arc<dyn AuxiliaryConditional>) -> Result<KernelComposition> {
    let d = target.dim();
    let on_x: Arc<dyn PointDensity> = Arc::new(OnX(target.clone()));
    let layout = Layout::new(d, d).tag("d", TagKind::Direction);
    let t1 = ImcmcKernel::new("irr-mala move", on_x.clone(), Arc::new(IrrMalaMap::new(target, 0)))
        .refresh(proposal)
        .layout(layout.clone());
    let t2 = ImcmcKernel::new("direction flip", on_x, Arc::new(FlipTag(0))).layout(layout);
    compose("irr-mala", vec![Arc::new(t1), Arc::new(t2)])
}

/// v ~ N(x + d ε ∇log p(x), 2ε).
pub fn make_irr_mala(target: Arc<dyn LogDensity>, eps: f64) -> Result<KernelComposition> {
    if !(eps > 0.0) {
        return Err(Error::Config(format!("eps = {eps} must be positive")));
    }
    let d = target.dim();
    let t = target.clone();
    let mean = move |z: &crate::point::JointPoint| {
        let g = t.gradient(&z.x).unwrap_or_else(|| vec![f64::NAN; z.x.len()]);
        let s = z.tags[0] as f64 * eps;
        z.x.iter().zip(&g).map(|(a, b)| a + s * b).collect()
    };
    let sd = (2.0 * eps).sqrt();
    make_irr_mala_with(target, Arc::new(GaussianBlock::new("drifted proposal", 0, d, mean, move |_| sd)))
}
