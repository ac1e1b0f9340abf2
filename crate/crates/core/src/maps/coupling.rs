use std::sync::Arc;

use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::point::JointPoint;

use super::FlowMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    X,
    V,
}

type VecFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Updates one block as a function of the other:
/// u ← u ⊙ exp(s(w)) + t(w). Without `log_scale` it is volume-preserving.
#[derive(Clone)]
pub struct CouplingLayer {
    pub update: Block,
    pub shift: VecFn,
    pub log_scale: Option<VecFn>,
}

impl CouplingLayer {
    pub fn additive(update: Block, shift: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self { update, shift: Arc::new(shift), log_scale: None }
    }

    pub fn affine(
        update: Block,
        shift: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        log_scale: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { update, shift: Arc::new(shift), log_scale: Some(Arc::new(log_scale)) }
    }

    fn blocks<'a>(&self, x: &'a mut [f64], v: &'a mut [f64]) -> (&'a mut [f64], &'a [f64]) {
        match self.update {
            Block::X => (x, v),
            Block::V => (v, x),
        }
    }

    fn forward(&self, x: &mut [f64], v: &mut [f64]) -> f64 {
        let (u, w) = self.blocks(x, v);
        let t = (self.shift)(w);
        let mut ld = 0.0;
        match &self.log_scale {
            Some(s) => {
                let s = s(w);
                for i in 0..u.len() {
                    u[i] = u[i] * s[i].exp() + t[i];
                    ld += s[i];
                }
            }
            None => u.iter_mut().zip(&t).for_each(|(a, b)| *a += b),
        }
        ld
    }

    fn inverse(&self, x: &mut [f64], v: &mut [f64]) -> f64 {
        let (u, w) = self.blocks(x, v);
        let t = (self.shift)(w);
        let mut ld = 0.0;
        match &self.log_scale {
            Some(s) => {
                let s = s(w);
                for i in 0..u.len() {
                    u[i] = (u[i] - t[i]) * (-s[i]).exp();
                    ld -= s[i];
                }
            }
            None => u.iter_mut().zip(&t).for_each(|(a, b)| *a -= b),
        }
        ld
    }
}

/// Stack of coupling layers on (x, v[..dim x]).
#[derive(Clone)]
pub struct CouplingMap {
    pub layers: Vec<CouplingLayer>,
    pub name: String,
}

impl CouplingMap {
    pub fn new(name: impl Into<String>, layers: Vec<CouplingLayer>) -> Self {
        Self { layers, name: name.into() }
    }

    pub fn volume_preserving(&self) -> bool {
        self.layers.iter().all(|l| l.log_scale.is_none())
    }

    /// x += J·tanh(β v₀) e₀, then `steps` leapfrog-shaped additive layers
    /// driven by the target gradient. A hand-set stand-in for a trained
    /// volume-preserving proposal.
    pub fn jump_leapfrog(target: Arc<dyn LogDensity>, jump: f64, beta: f64, eps: f64, steps: usize) -> Self {
        let mut layers = vec![CouplingLayer::additive(Block::X, move |v: &[f64]| {
            let mut t = vec![0.0; v.len()];
            t[0] = jump * (beta * v[0]).tanh();
            t
        })];
        for _ in 0..steps {
            layers.extend(leapfrog_layers(target.clone(), eps, None));
        }
        Self::new(format!("nice(J={jump}, eps={eps}, k={steps})"), layers)
    }

    /// Same as `jump_leapfrog` but the momentum updates carry a scale
    /// exp(c·tanh(x)), so the map is not volume-preserving.
    pub fn jump_leapfrog_affine(target: Arc<dyn LogDensity>, jump: f64, beta: f64, eps: f64, steps: usize, c: f64) -> Self {
        let mut m = Self::jump_leapfrog(target.clone(), jump, beta, eps, 0);
        for _ in 0..steps {
            m.layers.extend(leapfrog_layers(target.clone(), eps, Some(c)));
        }
        m.name = format!("l2hmc(J={jump}, eps={eps}, k={steps}, c={c})");
        m
    }
}

fn leapfrog_layers(target: Arc<dyn LogDensity>, eps: f64, scale: Option<f64>) -> Vec<CouplingLayer> {
    let kick = move |x: &[f64]| -> Vec<f64> {
        let g = target.gradient(x).unwrap_or_else(|| vec![f64::NAN; x.len()]);
        g.into_iter().map(|a| 0.5 * eps * a).collect()
    };
    let kick: VecFn = Arc::new(kick);
    let half = |k: VecFn| match scale {
        None => CouplingLayer { update: Block::V, shift: k, log_scale: None },
        Some(c) => CouplingLayer {
            update: Block::V,
            shift: k,
            log_scale: Some(Arc::new(move |x: &[f64]| x.iter().map(|a| c * a.tanh()).collect())),
        },
    };
    vec![
        half(kick.clone()),
        CouplingLayer::additive(Block::X, move |v: &[f64]| v.iter().map(|a| eps * a).collect()),
        half(kick),
    ]
}

impl FlowMap for CouplingMap {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn forward(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let d = z.x.len();
        if z.v.len() < d {
            return Err(Error::Layout("coupling map: momentum block too short".into()));
        }
        let mut p = z.clone();
        let mut ld = 0.0;
        for l in &self.layers {
            let (x, v) = (&mut p.x, &mut p.v[..d]);
            ld += l.forward(x, v);
        }
        Ok((p, ld))
    }
    fn inverse(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let d = z.x.len();
        if z.v.len() < d {
            return Err(Error::Layout("coupling map: momentum block too short".into()));
        }
        let mut p = z.clone();
        let mut ld = 0.0;
        for l in self.layers.iter().rev() {
            let (x, v) = (&mut p.x, &mut p.v[..d]);
            ld += l.inverse(x, v);
        }
        Ok((p, ld))
    }
}

/// x ↦ shift + scale ⊙ x on the target block only.
#[derive(Clone, Debug)]
pub struct AffineMap {
    pub shift: Vec<f64>,
    pub scale: Vec<f64>,
}

impl AffineMap {
    pub fn new(shift: Vec<f64>, scale: Vec<f64>) -> Result<Self> {
        if shift.len() != scale.len() || scale.iter().any(|s| *s == 0.0 || !s.is_finite()) {
            return Err(Error::Config("affine map needs matching, non-zero scales".into()));
        }
        Ok(Self { shift, scale })
    }

    pub fn identity(dim: usize) -> Self {
        Self { shift: vec![0.0; dim], scale: vec![1.0; dim] }
    }

    fn logdet(&self) -> f64 {
        self.scale.iter().map(|s| s.abs().ln()).sum()
    }
}

impl FlowMap for AffineMap {
    fn name(&self) -> String {
        "affine".into()
    }
    fn forward(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let mut p = z.clone();
        for (i, a) in p.x.iter_mut().enumerate() {
            *a = self.shift[i] + self.scale[i] * *a;
        }
        Ok((p, self.logdet()))
    }
    fn inverse(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let mut p = z.clone();
        for (i, a) in p.x.iter_mut().enumerate() {
            *a = (*a - self.shift[i]) / self.scale[i];
        }
        Ok((p, -self.logdet()))
    }
}

/// Density of z when T(z) = shift + scale ⊙ z has density `target`:
/// p_z(z) = p_x(T z) |∂T/∂z|.
#[derive(Clone)]
pub struct AffinePullback {
    pub target: Arc<dyn LogDensity>,
    pub map: AffineMap,
}

impl LogDensity for AffinePullback {
    fn dim(&self) -> usize {
        self.target.dim()
    }
    fn log_density(&self, z: &[f64]) -> f64 {
        let x: Vec<f64> = z.iter().enumerate().map(|(i, a)| self.map.shift[i] + self.map.scale[i] * a).collect();
        self.target.log_density(&x) + self.map.logdet()
    }
    fn gradient(&self, z: &[f64]) -> Option<Vec<f64>> {
        let x: Vec<f64> = z.iter().enumerate().map(|(i, a)| self.map.shift[i] + self.map.scale[i] * a).collect();
        let g = self.target.gradient(&x)?;
        Some(g.iter().zip(&self.map.scale).map(|(a, s)| a * s).collect())
    }
}
