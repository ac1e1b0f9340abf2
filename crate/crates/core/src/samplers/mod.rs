//! Builders that assemble conditionals and maps into named samplers.

pub mod cdf;
pub mod conditionals;
pub mod directional;
pub mod gibbs;
pub mod hamiltonian;
pub mod irr_mala;
pub mod lifted;
pub mod look_ahead;
pub mod mh;
pub mod mtm;
pub mod proposal;
pub mod sample_adaptive;
pub mod spec;
pub mod transdimensional;

pub use cdf::{make_cdf_deterministic, CdfKernel};
pub use conditionals::{ByTag, DiscreteSlot, DiscreteTag, GaussianBlock, MetricMomentum};
pub use directional::{
    flip_kernel, irr_nice_mc, make_directional_map, make_persistent, nice_mc, persistent_hmc, persistent_layout,
    refresh_kernel, DEFAULT_ALPHA,
};
pub use gibbs::{coordinate_kernel, make_gibbs, Scan, SweepMove};
pub use hamiltonian::{hmc, hmc_with_mass, make_embedded_flow, make_hamiltonian, neutra_affine, rmhmc};
pub use irr_mala::{make_irr_mala, make_irr_mala_with};
pub use lifted::{guided_walk, lifted_matrix, make_lifted, split_base};
pub use look_ahead::{make_look_ahead, LookAheadKernel};
pub use mh::{make_mh, make_mixture_proposal, mala, rwm};
pub use mtm::{make_multiple_try, Lambda, TrialSwap};
pub use proposal::{GaussianRw, Langevin, MatrixProposal, Proposal, ProposalAux, Source, TableProposal};
pub use sample_adaptive::{make_sample_adaptive, mean_aggregate, Aggregate, ElementSwap, ProductDensity};
pub use spec::{build_sampler, Built, SamplerKind, SamplerSpec, TargetHandle};
pub use transdimensional::{
    make_transdimensional, nested_gaussians, uniform_choice, DimensionMap, Empty, JumpMode, ModelChoice, ModelSpace,
    Resplit, StdNormalU, SwapBlocks,
};
