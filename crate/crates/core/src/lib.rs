//! Involutive MCMC.
//!
//! Every kernel here is a triple: auxiliary conditionals that extend the
//! target to a joint space, an involution on that space with its
//! log-Jacobian, and an accept/reject rule. Irreversible samplers are
//! ordered compositions of such kernels. Finite-state analogs of each
//! sampler can be enumerated exactly, which is how stationarity and detailed
//! balance are checked.

pub mod catalog;
pub mod chain;
pub mod density;
pub mod diagnostics;
pub mod error;
pub mod kernel;
pub mod maps;
pub mod point;
pub mod samplers;
pub mod targets;
pub mod verify;

pub use chain::{chain_rng, run_chain, run_chains, run_chains_sequential, ChainRng, ChainTrace, KernelStats};
pub use density::{FnDensity, LogDensity, OnX, PointDensity};
pub use error::{Error, Result};
pub use kernel::{
    compose, log_accept, AcceptanceRule, AuxiliaryConditional, ImcmcKernel, KernelComposition, StepLog, Transition,
};
pub use maps::{FlowMap, Involution};
pub use point::{JointPoint, Layout, TagKind};
