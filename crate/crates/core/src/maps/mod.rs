//! Deterministic maps on joint points: involutions, bijections with a
//! log-abs-det Jacobian, and the combinators turning the latter into the former.

use std::sync::Arc;

use crate::error::Result;
use crate::point::JointPoint;

mod basic;
mod cdf;
mod combinators;
mod coupling;
mod implicit;
mod lattice;
mod leapfrog;

pub use basic::{FlipTag, NegateTagIf, NegateV, Product, Slot, Swap};
pub use cdf::{cdf_map, Cdf1d, CDF_CLAMP, DEFAULT_SHIFT};
pub use combinators::{DirectionAugment, Embed, HamiltonianInvolution, IrrMalaMap, MixtureInvolution};
pub use coupling::{AffineMap, AffinePullback, Block, CouplingLayer, CouplingMap};
pub use implicit::{ConstantMetric, FnMetric, ImplicitLeapfrog, Metric};
pub use lattice::{LatticeCoupling, LatticeLeapfrog, TablePermutation, XPermutation};
pub use leapfrog::{hamiltonian, Leapfrog, LeapfrogConfig};

/// A self-inverse map; `apply` returns the image and log|det J| of the
/// continuous blocks.
pub trait Involution: Send + Sync {
    fn name(&self) -> String;
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)>;
}

/// A bijection with its inverse, each returning log|det J|.
pub trait FlowMap: Send + Sync {
    fn name(&self) -> String;
    fn forward(&self, z: &JointPoint) -> Result<(JointPoint, f64)>;
    fn inverse(&self, z: &JointPoint) -> Result<(JointPoint, f64)>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

impl Involution for Identity {
    fn name(&self) -> String {
        "identity".into()
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        Ok((z.clone(), 0.0))
    }
}

impl FlowMap for Identity {
    fn name(&self) -> String {
        "identity".into()
    }
    fn forward(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        Ok((z.clone(), 0.0))
    }
    fn inverse(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        Ok((z.clone(), 0.0))
    }
}

/// Swaps the roles of forward and inverse.
#[derive(Clone)]
pub struct Inverse(pub Arc<dyn FlowMap>);

impl FlowMap for Inverse {
    fn name(&self) -> String {
        format!("inverse({})", self.0.name())
    }
    fn forward(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        self.0.inverse(z)
    }
    fn inverse(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        self.0.forward(z)
    }
}

/// Applies `inner` `k` times (inverse: the inverse `k` times).
#[derive(Clone)]
pub struct Power {
    pub inner: Arc<dyn FlowMap>,
    pub k: usize,
}

impl FlowMap for Power {
    fn name(&self) -> String {
        format!("{}^{}", self.inner.name(), self.k)
    }
    fn forward(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let mut p = z.clone();
        let mut ld = 0.0;
        for _ in 0..self.k {
            let (q, l) = self.inner.forward(&p)?;
            p = q;
            ld += l;
        }
        Ok((p, ld))
    }
    fn inverse(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let mut p = z.clone();
        let mut ld = 0.0;
        for _ in 0..self.k {
            let (q, l) = self.inner.inverse(&p)?;
            p = q;
            ld += l;
        }
        Ok((p, ld))
    }
}
