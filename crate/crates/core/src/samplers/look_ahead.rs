use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, RngExt};

use crate::density::{LogDensity, OnX, PointDensity};
use crate::error::{Error, Result};
use crate::kernel::{compose, Acceptance, AuxiliaryConditional, KernelComposition, StepLog, Transition};
use crate::maps::FlowMap;
use crate::point::JointPoint;

use super::directional::{flip_kernel, persistent_layout, refresh_kernel};

/// Move from z = (y, d) to (T_d^k y, -d) with probability π_k, k = 1..K,
/// otherwise stay. The π_k follow the recursive look-ahead formula, which
/// makes every (z, f_k z) pair balanced.
pub struct LookAheadKernel {
    target: Arc<dyn PointDensity>,
    momentum: Arc<dyn AuxiliaryConditional>,
    flow: Arc<dyn FlowMap>,
    k_max: usize,
    tag: usize,
}

struct Orbit {
    points: Vec<JointPoint>,
    /// log p at each orbit point plus the cumulative log-Jacobian from y_0.
    score: Vec<f64>,
}

impl LookAheadKernel {
    pub fn new(
        target: Arc<dyn LogDensity>,
        momentum: Arc<dyn AuxiliaryConditional>,
        flow: Arc<dyn FlowMap>,
        k_max: usize,
    ) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::Config("look-ahead needs K >= 1".into()));
        }
        Ok(Self { target: Arc::new(OnX(target)), momentum, flow, k_max, tag: 0 })
    }

    fn log_joint(&self, z: &JointPoint) -> f64 {
        let lp = self.target.log_density(z);
        if lp == f64::NEG_INFINITY {
            return lp;
        }
        lp + self.momentum.log_pdf(z)
    }

    fn orbit(&self, z: &JointPoint) -> Result<Orbit> {
        let d = z.tags[self.tag];
        let mut points = vec![z.clone()];
        let mut score = vec![self.log_joint(z)];
        if !score[0].is_finite() {
            return Err(Error::InvalidDensity("look-ahead: current point has zero density".into()));
        }
        let mut cum = 0.0;
        for _ in 0..self.k_max {
            let last = points.last().expect("nonempty");
            let (p, ld) = if d == 1 { self.flow.forward(last)? } else { self.flow.inverse(last)? };
            cum += ld;
            let s = self.log_joint(&p) + cum;
            if s.is_nan() {
                return Err(Error::InvalidDensity("look-ahead: NaN along the orbit".into()));
            }
            score.push(s);
            points.push(p);
        }
        Ok(Orbit { points, score })
    }

    /// π_1..π_K at the current point.
    pub fn probabilities(&self, z: &JointPoint) -> Result<Vec<f64>> {
        let o = self.orbit(z)?;
        let mut memo = HashMap::new();
        Ok((1..=self.k_max).map(|k| pi(&o.score, 0, 1, k, &mut memo)).collect())
    }

    fn moved(&self, z: &JointPoint, o: &Orbit, k: usize) -> JointPoint {
        let mut p = o.points[k].clone();
        p.tags[self.tag] = -z.tags[self.tag];
        p
    }
}

/// π_k at orbit position i looking in direction s (±1 along the orbit).
fn pi(score: &[f64], i: usize, s: i64, k: usize, memo: &mut HashMap<(usize, i64, usize), f64>) -> f64 {
    if let Some(&v) = memo.get(&(i, s, k)) {
        return v;
    }
    let j = (i as i64 + s * k as i64) as usize;
    let own: f64 = (1..k).map(|l| pi(score, i, s, l, memo)).sum();
    let back: f64 = (1..k).map(|l| pi(score, j, -s, l, memo)).sum();
    let r = if score[j] == f64::NEG_INFINITY { 0.0 } else { (score[j] - score[i]).exp() };
    let v = (1.0 - own).min(r * (1.0 - back)).max(0.0);
    memo.insert((i, s, k), v);
    v
}

impl Transition for LookAheadKernel {
    fn name(&self) -> String {
        format!("look-ahead(K={})", self.k_max)
    }

    fn step(&self, z: &mut JointPoint, rng: &mut dyn Rng, log: &mut StepLog) -> Result<()> {
        let o = self.orbit(z)?;
        let mut memo = HashMap::new();
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for k in 1..=self.k_max {
            acc += pi(&o.score, 0, 1, k, &mut memo);
            if u < acc {
                *z = self.moved(z, &o, k);
                log.entries.push(Acceptance { prob: acc.min(1.0), accepted: true });
                return Ok(());
            }
        }
        log.entries.push(Acceptance { prob: acc.min(1.0), accepted: false });
        Ok(())
    }

    fn successors(&self, z: &JointPoint) -> Result<Vec<(JointPoint, f64)>> {
        let o = self.orbit(z)?;
        let mut memo = HashMap::new();
        let mut out = Vec::new();
        let mut total = 0.0;
        for k in 1..=self.k_max {
            let p = pi(&o.score, 0, 1, k, &mut memo);
            if p > 0.0 {
                out.push((self.moved(z, &o, k), p));
                total += p;
            }
        }
        if total < 1.0 {
            out.push((z.clone(), 1.0 - total));
        }
        Ok(out)
    }
}

/// Refresh, look-ahead move, direction flip. `refresh = None` skips the
/// first kernel.
pub fn make_look_ahead(
    target: Arc<dyn LogDensity>,
    momentum: Arc<dyn AuxiliaryConditional>,
    refresh: Option<Arc<dyn AuxiliaryConditional>>,
    flow: Arc<dyn FlowMap>,
    k_max: usize,
) -> Result<KernelComposition> {
    let d = target.dim();
    let on_x: Arc<dyn PointDensity> = Arc::new(OnX(target.clone()));
    let mut parts: Vec<Arc<dyn Transition>> = Vec::new();
    if let Some(r) = refresh {
        parts.push(Arc::new(refresh_kernel(on_x.clone(), d, momentum.clone(), r)));
    }
    parts.push(Arc::new(LookAheadKernel::new(target, momentum, flow, k_max)?));
    parts.push(Arc::new(flip_kernel(on_x, persistent_layout(d))));
    compose("look-ahead", parts)
}
