use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};

use crate::density::PointDensity;
use crate::error::{Error, Result};
use crate::kernel::{compose, AuxiliaryConditional, ImcmcKernel, Transition};
use crate::maps::{Involution, NegateTagIf};
use crate::point::{JointPoint, Layout, TagKind};

use super::conditionals::DiscreteTag;
use super::proposal::{GaussianRw, Proposal};

/// Dimension-matching bijection between (x^(k), u) and (x^(j), u').
pub trait DimensionMap: Send + Sync {
    fn name(&self) -> String;
    fn apply(&self, x: &[f64], u: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)>;
}

/// Concatenates [x, u] and splits after `at` entries (identity padding).
#[derive(Clone, Copy, Debug)]
pub struct Resplit {
    pub at: usize,
}

impl DimensionMap for Resplit {
    fn name(&self) -> String {
        format!("resplit({})", self.at)
    }
    fn apply(&self, x: &[f64], u: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
        let all: Vec<f64> = x.iter().chain(u).copied().collect();
        if self.at > all.len() {
            return Err(Error::Layout("resplit beyond the joint vector".into()));
        }
        Ok((all[..self.at].to_vec(), all[self.at..].to_vec(), 0.0))
    }
}

/// (x, u) -> (u, x), the within-model move.
#[derive(Clone, Copy, Debug)]
pub struct SwapBlocks;

impl DimensionMap for SwapBlocks {
    fn name(&self) -> String {
        "swap".into()
    }
    fn apply(&self, x: &[f64], u: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
        if x.len() != u.len() {
            return Err(Error::Layout("within-model swap needs equal blocks".into()));
        }
        Ok((u.to_vec(), x.to_vec(), 0.0))
    }
}

/// Degenerate proposal on R^0.
#[derive(Clone, Copy, Debug)]
pub struct Empty;

impl Proposal for Empty {
    fn sample(&self, _from: &[f64], _rng: &mut dyn Rng) -> Vec<f64> {
        Vec::new()
    }
    fn log_q(&self, to: &[f64], _from: &[f64]) -> f64 {
        if to.is_empty() {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    }
    fn support(&self, _from: &[f64]) -> Option<Vec<(Vec<f64>, f64)>> {
        Some(vec![(Vec::new(), 1.0)])
    }
}

pub struct Model {
    pub dim: usize,
    /// log p(x^(k), k), model prior included.
    pub log_density: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

#[derive(Clone)]
pub struct Move {
    /// u ~ q(u | x^(k)).
    pub u: Arc<dyn Proposal>,
    pub u_dim: usize,
    pub map: Arc<dyn DimensionMap>,
}

#[derive(Default)]
pub struct ModelSpace {
    pub models: Vec<Model>,
    pub moves: BTreeMap<(usize, usize), Move>,
}

impl ModelSpace {
    pub fn add_model(&mut self, dim: usize, log_density: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> usize {
        self.models.push(Model { dim, log_density: Arc::new(log_density) });
        self.models.len() - 1
    }

    /// Within-model move with u ~ q(·|x) and the block swap.
    pub fn add_within(&mut self, k: usize, q: Arc<dyn Proposal>) {
        let d = self.models[k].dim;
        self.moves.insert((k, k), Move { u: q, u_dim: d, map: Arc::new(SwapBlocks) });
    }

    /// Identity-padding jump pair between models k and j.
    pub fn add_padding_pair(&mut self, k: usize, j: usize, u_kj: Arc<dyn Proposal>, u_jk: Arc<dyn Proposal>) -> Result<()> {
        let (dk, dj) = (self.models[k].dim, self.models[j].dim);
        let (ukj, ujk) = if dj >= dk { (dj - dk, 0) } else { (0, dk - dj) };
        self.moves.insert((k, j), Move { u: u_kj, u_dim: ukj, map: Arc::new(Resplit { at: dj }) });
        self.moves.insert((j, k), Move { u: u_jk, u_dim: ujk, map: Arc::new(Resplit { at: dk }) });
        Ok(())
    }

    fn density(&self, k: i64, x: &[f64]) -> f64 {
        match usize::try_from(k).ok().and_then(|k| self.models.get(k)) {
            Some(m) if m.dim == x.len() => (m.log_density)(x),
            Some(_) => f64::NAN,
            None => f64::NEG_INFINITY,
        }
    }

    /// Checks dimension matching and that the paired maps invert each other
    /// on `trials` random points.
    pub fn validate(&self, trials: usize, seed: u64) -> Result<()> {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for (&(k, j), m) in &self.moves {
            let (Some(mk), Some(mj)) = (self.models.get(k), self.models.get(j)) else {
                return Err(Error::Config(format!("move {k}->{j} references a missing model")));
            };
            let back = self.moves.get(&(j, k)).ok_or_else(|| Error::Config(format!("move {k}->{j} has no reverse")))?;
            if mk.dim + m.u_dim != mj.dim + back.u_dim {
                return Err(Error::Config(format!(
                    "move {k}->{j}: {} + {} != {} + {}",
                    mk.dim, m.u_dim, mj.dim, back.u_dim
                )));
            }
            for _ in 0..trials {
                let x: Vec<f64> = (0..mk.dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                let u: Vec<f64> = (0..m.u_dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                let (x1, u1, l1) = m.map.apply(&x, &u)?;
                if x1.len() != mj.dim || u1.len() != back.u_dim {
                    return Err(Error::Config(format!("move {k}->{j} produced the wrong dimensions")));
                }
                let (x2, u2, l2) = back.map.apply(&x1, &u1)?;
                let err = x.iter().zip(&x2).chain(u.iter().zip(&u2)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if err > 1e-10 || (l1 + l2).abs() > 1e-8 {
                    return Err(Error::Config(format!("moves {k}->{j} and {j}->{k} are not inverse ({err:e})")));
                }
            }
        }
        Ok(())
    }
}

/// p(x^(k), k) with the model in tag 0.
struct ModelDensity(Arc<ModelSpace>);

impl PointDensity for ModelDensity {
    fn log_density(&self, z: &JointPoint) -> f64 {
        self.0.density(z.tags[0], &z.x)
    }
}

/// u ~ q_m(u | x) for the move selected by `select`.
struct MoveAux {
    space: Arc<ModelSpace>,
    select: fn(&JointPoint) -> Option<(usize, usize)>,
}

impl MoveAux {
    fn mv(&self, z: &JointPoint) -> Option<&Move> {
        (self.select)(z).and_then(|m| self.space.moves.get(&m))
    }
}

impl AuxiliaryConditional for MoveAux {
    fn name(&self) -> String {
        "move auxiliary".into()
    }
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn Rng) {
        z.v = match self.mv(z) {
            Some(m) => m.u.sample(&z.x, rng),
            None => Vec::new(),
        };
    }
    fn log_pdf(&self, z: &JointPoint) -> f64 {
        match self.mv(z) {
            Some(m) if z.v.len() == m.u_dim => m.u.log_q(&z.v, &z.x),
            Some(_) => f64::NEG_INFINITY,
            None if z.v.is_empty() => 0.0,
            None => f64::NEG_INFINITY,
        }
    }
    fn enumerate(&self, z: &JointPoint) -> Option<Vec<(JointPoint, f64)>> {
        let s = match self.mv(z) {
            Some(m) => m.u.support(&z.x)?,
            None => vec![(Vec::new(), 1.0)],
        };
        Some(s.into_iter().map(|(u, p)| (z.clone().with_v(u), p)).collect())
    }
}

fn index(t: i64, n: usize) -> Option<usize> {
    usize::try_from(t).ok().filter(|&i| i < n)
}

/// (x, u, k, j) -> (h_kj(x, u), j, k).
struct JumpMap(Arc<ModelSpace>);

impl Involution for JumpMap {
    fn name(&self) -> String {
        "model jump".into()
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let n = self.0.models.len();
        let (k, j) = (index(z.tags[0], n), index(z.tags[1], n));
        let (Some(k), Some(j)) = (k, j) else {
            return Err(Error::Layout("model tag out of range".into()));
        };
        let m = self.0.moves.get(&(k, j)).ok_or_else(|| Error::Config(format!("no move {k}->{j}")))?;
        let (x, u, ld) = m.map.apply(&z.x, &z.v)?;
        Ok((JointPoint { x, v: u, tags: vec![j as i64, k as i64] }, ld))
    }
}

/// Tags (k, ν, m): m = 0 applies the within-model move, m = 1 jumps to k+ν
/// and negates ν. Jumps to a missing model only relabel, and land on zero
/// density.
struct DirectedJump(Arc<ModelSpace>);

impl Involution for DirectedJump {
    fn name(&self) -> String {
        "directed jump".into()
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let (k, nu, m) = (z.tags[0], z.tags[1], z.tags[2]);
        let n = self.0.models.len();
        match m {
            0 => {
                let ki = index(k, n).ok_or_else(|| Error::Layout("model tag out of range".into()))?;
                let mv = self.0.moves.get(&(ki, ki)).ok_or_else(|| Error::Config(format!("no within move for {ki}")))?;
                let (x, u, ld) = mv.map.apply(&z.x, &z.v)?;
                Ok((JointPoint { x, v: u, tags: z.tags.clone() }, ld))
            }
            1 => {
                let to = k + nu;
                let mv = index(k, n).zip(index(to, n)).and_then(|(a, b)| self.0.moves.get(&(a, b)));
                let tags = vec![to, -nu, 1];
                match mv {
                    Some(mv) => {
                        let (x, u, ld) = mv.map.apply(&z.x, &z.v)?;
                        Ok((JointPoint { x, v: u, tags }, ld))
                    }
                    None => Ok((JointPoint { x: z.x.clone(), v: z.v.clone(), tags }, 0.0)),
                }
            }
            _ => Err(Error::Layout(format!("move type {m}"))),
        }
    }
}

/// Distribution of the target model j given (k, x).
pub type ModelChoice = Arc<dyn Fn(usize, &[f64]) -> Vec<(usize, f64)> + Send + Sync>;

pub enum JumpMode {
    Reversible { choice: ModelChoice },
    NonReversible { tau: f64 },
}

/// Reversible jump (tags k, j) or the non-reversible directed scheme
/// (tags k, ν, m).
pub fn make_transdimensional(space: Arc<ModelSpace>, mode: JumpMode) -> Result<Arc<dyn Transition>> {
    space.validate(5, 0)?;
    let target: Arc<dyn PointDensity> = Arc::new(ModelDensity(space.clone()));
    match mode {
        JumpMode::Reversible { choice } => {
            let n = space.models.len();
            let pick = DiscreteTag::new("target model", 1, move |z| {
                let k = index(z.tags[0], n).expect("model tag");
                choice(k, &z.x).into_iter().map(|(j, p)| (j as i64, p)).collect()
            });
            let aux = MoveAux {
                space: space.clone(),
                select: |z| Some((usize::try_from(z.tags[0]).ok()?, usize::try_from(z.tags[1]).ok()?)),
            };
            Ok(Arc::new(
                ImcmcKernel::new("rjmcmc", target, Arc::new(JumpMap(space)))
                    .refresh(Arc::new(pick))
                    .refresh(Arc::new(aux))
                    .layout(Layout::variable().tag("k", TagKind::Index).tag("j", TagKind::Index)),
            ))
        }
        JumpMode::NonReversible { tau } => {
            if !(0.0..1.0).contains(&tau) {
                return Err(Error::Config(format!("tau = {tau} outside [0, 1)")));
            }
            for k in 0..space.models.len() {
                if !space.moves.contains_key(&(k, k)) {
                    return Err(Error::Config(format!("model {k} has no within-model move")));
                }
            }
            let layout =
                Layout::variable().tag("k", TagKind::Index).tag("nu", TagKind::Direction).tag("m", TagKind::Index);
            let m = DiscreteTag::new("move type", 2, move |_| vec![(0, tau), (1, 1.0 - tau)]);
            let aux = MoveAux {
                space: space.clone(),
                select: |z| {
                    let k = usize::try_from(z.tags[0]).ok()?;
                    let to = if z.tags[2] == 0 { k } else { usize::try_from(z.tags[0] + z.tags[1]).ok()? };
                    Some((k, to))
                },
            };
            let t1 = ImcmcKernel::new("nrj move", target.clone(), Arc::new(DirectedJump(space)))
                .refresh(Arc::new(m))
                .refresh(Arc::new(aux))
                .layout(layout.clone());
            let t2 = ImcmcKernel::new("nrj direction", target, Arc::new(NegateTagIf { target: 1, cond: 2, value: 1 }))
                .layout(layout);
            Ok(Arc::new(compose("nrj", vec![Arc::new(t1), Arc::new(t2)])?))
        }
    }
}

fn normal_logpdf(x: f64, var: f64) -> f64 {
    -0.5 * x * x / var - 0.5 * (2.0 * PI * var).ln()
}

/// Two nested Gaussian models with equal evidence: N(0, 1) on R and
/// N(0, diag(1, 2)) on R², prior 1/2 each, identity padding with u ~ N(0, 1)
/// and Gaussian random-walk within-model moves.
pub fn nested_gaussians(rw_sd: f64) -> Result<ModelSpace> {
    let mut s = ModelSpace::default();
    let half = 0.5f64.ln();
    let a = s.add_model(1, move |x| half + normal_logpdf(x[0], 1.0));
    let b = s.add_model(2, move |x| half + normal_logpdf(x[0], 1.0) + normal_logpdf(x[1], 2.0));
    s.add_within(a, Arc::new(GaussianRw { sd: rw_sd }));
    s.add_within(b, Arc::new(GaussianRw { sd: rw_sd }));
    s.add_padding_pair(a, b, Arc::new(StdNormalU), Arc::new(Empty))?;
    Ok(s)
}

/// u ~ N(0, 1) on R, independent of x.
#[derive(Clone, Copy, Debug)]
pub struct StdNormalU;

impl Proposal for StdNormalU {
    fn sample(&self, _from: &[f64], rng: &mut dyn Rng) -> Vec<f64> {
        use rand_distr::{Distribution, StandardNormal};
        vec![StandardNormal.sample(rng)]
    }
    fn log_q(&self, to: &[f64], _from: &[f64]) -> f64 {
        if to.len() != 1 {
            return f64::NEG_INFINITY;
        }
        normal_logpdf(to[0], 1.0)
    }
}

/// j uniform over all models, k included.
pub fn uniform_choice(n: usize) -> ModelChoice {
    Arc::new(move |_, _| (0..n).map(|j| (j, 1.0 / n as f64)).collect())
}
