use std::sync::Arc;

use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::point::JointPoint;

use super::{FlowMap, Involution};

/// F∘T: run the flow forward, then negate the momentum block v[..dim x].
/// An involution whenever F T F = T⁻¹, which holds for leapfrog integrators.
#[derive(Clone)]
pub struct HamiltonianInvolution {
    pub flow: Arc<dyn FlowMap>,
}

impl HamiltonianInvolution {
    pub fn new(flow: Arc<dyn FlowMap>) -> Self {
        Self { flow }
    }
}

impl Involution for HamiltonianInvolution {
    fn name(&self) -> String {
        format!("F∘{}", self.flow.name())
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let (mut p, ld) = self.flow.forward(z)?;
        let d = p.x.len().min(p.v.len());
        for a in &mut p.v[..d] {
            *a = -*a;
        }
        Ok((p, ld))
    }
}

/// f(y, +1) = (T y, -1), f(y, -1) = (T⁻¹ y, +1). An involution for any bijection T.
#[derive(Clone)]
pub struct DirectionAugment {
    pub flow: Arc<dyn FlowMap>,
    pub tag: usize,
}

impl DirectionAugment {
    pub fn new(flow: Arc<dyn FlowMap>, tag: usize) -> Self {
        Self { flow, tag }
    }
}

impl Involution for DirectionAugment {
    fn name(&self) -> String {
        format!("directional({})", self.flow.name())
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let d = *z.tags.get(self.tag).ok_or_else(|| Error::Layout("missing direction tag".into()))?;
        let (mut p, ld) = match d {
            1 => self.flow.forward(z)?,
            -1 => self.flow.inverse(z)?,
            _ => return Err(Error::Layout(format!("direction tag = {d}"))),
        };
        p.tags[self.tag] = -d;
        Ok((p, ld))
    }
}

/// T⁻¹∘f∘T: `to` moves into the space where `inner` is defined.
#[derive(Clone)]
pub struct Embed {
    pub to: Arc<dyn FlowMap>,
    pub inner: Arc<dyn Involution>,
}

impl Embed {
    pub fn new(to: Arc<dyn FlowMap>, inner: Arc<dyn Involution>) -> Self {
        Self { to, inner }
    }
}

impl Involution for Embed {
    fn name(&self) -> String {
        format!("embed({}, {})", self.to.name(), self.inner.name())
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let (a, l1) = self.to.forward(z)?;
        let (b, l2) = self.inner.apply(&a)?;
        let (c, l3) = self.to.inverse(&b)?;
        Ok((c, l1 + l2 + l3))
    }
}

/// Family of involutions selected by an index tag that every member leaves
/// unchanged. Tag values outside the family are an error.
#[derive(Clone)]
pub struct MixtureInvolution {
    pub tag: usize,
    pub family: Vec<Arc<dyn Involution>>,
}

impl MixtureInvolution {
    pub fn new(tag: usize, family: Vec<Arc<dyn Involution>>) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::Config("empty involution family".into()));
        }
        Ok(Self { tag, family })
    }
}

impl Involution for MixtureInvolution {
    fn name(&self) -> String {
        format!("mixture[{}]", self.family.len())
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let a = *z.tags.get(self.tag).ok_or_else(|| Error::Layout("missing index tag".into()))?;
        let f = usize::try_from(a)
            .ok()
            .and_then(|i| self.family.get(i))
            .ok_or_else(|| Error::Config(format!("index tag {a} outside the family")))?;
        let (p, ld) = f.apply(z)?;
        if p.tags.get(self.tag) != Some(&a) {
            return Err(Error::Config(format!("family member `{}` changed the index tag", f.name())));
        }
        Ok((p, ld))
    }
}

/// (x, v, d) -> (v, x, -d·sign(∇log p(x)·∇log p(v))) with sign(0) = +1.
#[derive(Clone)]
pub struct IrrMalaMap {
    pub target: Arc<dyn LogDensity>,
    pub tag: usize,
}

impl IrrMalaMap {
    pub fn new(target: Arc<dyn LogDensity>, tag: usize) -> Self {
        Self { target, tag }
    }

    pub fn gradient_sign(&self, x: &[f64], v: &[f64]) -> Result<i64> {
        let gx = self.target.gradient(x).ok_or_else(|| Error::Config("target has no gradient".into()))?;
        let gv = self.target.gradient(v).ok_or_else(|| Error::Config("target has no gradient".into()))?;
        let dot: f64 = gx.iter().zip(&gv).map(|(a, b)| a * b).sum();
        if dot.is_nan() {
            return Err(Error::NonFiniteGradient(x.to_vec()));
        }
        Ok(if dot < 0.0 { -1 } else { 1 })
    }
}

impl Involution for IrrMalaMap {
    fn name(&self) -> String {
        "irr-mala".into()
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let d = z.x.len();
        if z.v.len() < d {
            return Err(Error::Layout("proposal block too short".into()));
        }
        let s = self.gradient_sign(&z.x, &z.v[..d])?;
        let mut p = z.clone();
        p.x.copy_from_slice(&z.v[..d]);
        p.v[..d].copy_from_slice(&z.x);
        p.tags[self.tag] = -z.tags[self.tag] * s;
        Ok((p, 0.0))
    }
}
