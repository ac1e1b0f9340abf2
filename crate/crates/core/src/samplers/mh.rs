use std::sync::Arc;

use crate::density::{LogDensity, OnX};
use crate::kernel::{AuxiliaryConditional, ImcmcKernel};
use crate::maps::Swap;
use crate::point::{Layout, TagKind};

use super::proposal::{GaussianRw, Langevin, Proposal, ProposalAux, Source};

/// Metropolis-Hastings: v ~ q(·|x), swap x and v.
pub fn make_mh(target: Arc<dyn LogDensity>, proposal: Arc<dyn Proposal>) -> ImcmcKernel {
    let d = target.dim();
    ImcmcKernel::new("mh", Arc::new(OnX(target)), Arc::new(Swap::x_v(d, 0)))
        .refresh(Arc::new(ProposalAux::new(proposal, Source::X, 0, d)))
        .layout(Layout::new(d, d))
}

pub fn rwm(target: Arc<dyn LogDensity>, sd: f64) -> ImcmcKernel {
    make_mh(target, Arc::new(GaussianRw { sd }))
}

pub fn mala(target: Arc<dyn LogDensity>, eps: f64) -> ImcmcKernel {
    make_mh(target.clone(), Arc::new(Langevin { target, eps }))
}

/// Mixture proposal: a ~ q_f(a|x) into tag 0, then v ~ q_r(v|a); x and v are
/// swapped with a held fixed.
pub fn make_mixture_proposal(
    target: Arc<dyn LogDensity>,
    q_f: Arc<dyn AuxiliaryConditional>,
    q_r: Arc<dyn AuxiliaryConditional>,
) -> ImcmcKernel {
    let d = target.dim();
    ImcmcKernel::new("mixture proposal", Arc::new(OnX(target)), Arc::new(Swap::x_v(d, 0)))
        .refresh(q_f)
        .refresh(q_r)
        .layout(Layout::new(d, d).tag("a", TagKind::Index))
}
