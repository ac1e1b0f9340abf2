use std::sync::Arc;

use crate::density::{LogDensity, OnX};
use crate::error::Result;
use crate::kernel::{AuxiliaryConditional, ImcmcKernel};
use crate::maps::{
    AffineMap, AffinePullback, Embed, FlowMap, HamiltonianInvolution, ImplicitLeapfrog, Inverse, Involution, Leapfrog,
    LeapfrogConfig, Metric,
};
use crate::point::Layout;

use super::conditionals::{GaussianBlock, MetricMomentum};

/// Refresh the momentum, then apply F∘flow.
pub fn make_hamiltonian(
    target: Arc<dyn LogDensity>,
    momentum: Arc<dyn AuxiliaryConditional>,
    flow: Arc<dyn FlowMap>,
) -> ImcmcKernel {
    let d = target.dim();
    ImcmcKernel::new("hmc", Arc::new(OnX(target)), Arc::new(HamiltonianInvolution::new(flow)))
        .refresh(momentum)
        .layout(Layout::new(d, d))
}

pub fn hmc(target: Arc<dyn LogDensity>, cfg: LeapfrogConfig) -> ImcmcKernel {
    let d = target.dim();
    let flow = Arc::new(Leapfrog::new(target.clone(), cfg));
    make_hamiltonian(target, Arc::new(GaussianBlock::momentum(d, 1.0)), flow)
}

/// HMC with momentum N(0, var I).
pub fn hmc_with_mass(target: Arc<dyn LogDensity>, cfg: LeapfrogConfig, var: f64) -> ImcmcKernel {
    let d = target.dim();
    let flow = Arc::new(Leapfrog::new(target.clone(), cfg).with_inv_mass(vec![1.0 / var; d]));
    make_hamiltonian(target, Arc::new(GaussianBlock::momentum(d, var.sqrt())), flow)
}

/// Riemannian HMC: v ~ N(0, G(x)) and the implicit leapfrog.
pub fn rmhmc(target: Arc<dyn LogDensity>, metric: Arc<dyn Metric>, cfg: LeapfrogConfig) -> ImcmcKernel {
    let flow = Arc::new(ImplicitLeapfrog::new(target.clone(), metric.clone(), cfg));
    make_hamiltonian(target, Arc::new(MetricMomentum { metric }), flow)
}

/// A kernel whose involution runs inside the space reached by `to`.
pub fn make_embedded_flow(
    target: Arc<dyn LogDensity>,
    momentum: Arc<dyn AuxiliaryConditional>,
    to: Arc<dyn FlowMap>,
    inner: Arc<dyn Involution>,
) -> ImcmcKernel {
    let d = target.dim();
    ImcmcKernel::new("neutra", Arc::new(OnX(target)), Arc::new(Embed::new(to, inner)))
        .refresh(momentum)
        .layout(Layout::new(d, d))
}

/// NeuTra with an affine map x = μ + σ z: HMC on the pulled-back density,
/// moved back to the original space.
pub fn neutra_affine(target: Arc<dyn LogDensity>, map: AffineMap, cfg: LeapfrogConfig) -> Result<ImcmcKernel> {
    let d = target.dim();
    let latent: Arc<dyn LogDensity> = Arc::new(AffinePullback { target: target.clone(), map: map.clone() });
    let inner = Arc::new(HamiltonianInvolution::new(Arc::new(Leapfrog::new(latent, cfg))));
    let to = Arc::new(Inverse(Arc::new(map)));
    Ok(make_embedded_flow(target, Arc::new(GaussianBlock::momentum(d, 1.0)), to, inner))
}
