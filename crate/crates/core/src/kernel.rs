use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, RngExt};

use crate::density::PointDensity;
use crate::error::{Error, Result};
use crate::maps::Involution;
use crate::point::{JointPoint, Layout};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AcceptanceRule {
    #[default]
    MetropolisMin,
    Barker,
}

/// Acceptance probability for a proposal given current and proposed joint
/// log-densities and the log-abs-det Jacobian of the move.
pub fn log_accept(rule: AcceptanceRule, log_p_current: f64, log_p_proposed: f64, logdet: f64) -> Result<f64> {
    if log_p_current.is_nan() || log_p_proposed.is_nan() || logdet.is_nan() {
        return Err(Error::InvalidDensity(format!(
            "NaN in acceptance test (current {log_p_current}, proposed {log_p_proposed}, logdet {logdet})"
        )));
    }
    if log_p_proposed == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if !log_p_current.is_finite() || !log_p_proposed.is_finite() || !logdet.is_finite() {
        return Err(Error::InvalidDensity(format!(
            "non-finite acceptance input (current {log_p_current}, proposed {log_p_proposed}, logdet {logdet})"
        )));
    }
    let r = log_p_proposed - log_p_current + logdet;
    Ok(match rule {
        AcceptanceRule::MetropolisMin => {
            if r >= 0.0 {
                1.0
            } else {
                r.exp()
            }
        }
        AcceptanceRule::Barker => {
            if r >= 0.0 {
                1.0 / (1.0 + (-r).exp())
            } else {
                let e = r.exp();
                e / (1.0 + e)
            }
        }
    })
}

/// p(v|x) and friends: writes its slot(s) of a joint point and scores them.
pub trait AuxiliaryConditional: Send + Sync {
    fn name(&self) -> String;
    fn sample(&self, z: &mut JointPoint, rng: &mut dyn Rng);
    fn log_pdf(&self, z: &JointPoint) -> f64;
    /// Every value of the slot with its probability, for finite supports.
    fn enumerate(&self, _z: &JointPoint) -> Option<Vec<(JointPoint, f64)>> {
        None
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Acceptance {
    pub prob: f64,
    pub accepted: bool,
}

/// Acceptance records of the leaf kernels touched during one step, in order.
#[derive(Clone, Debug, Default)]
pub struct StepLog {
    pub entries: Vec<Acceptance>,
}

impl StepLog {
    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn all_accepted(&self) -> bool {
        self.entries.iter().all(|a| a.accepted)
    }
}

/// Anything that moves a joint point: single kernels, compositions, special
/// deterministic kernels.
pub trait Transition: Send + Sync {
    fn name(&self) -> String;
    fn step(&self, z: &mut JointPoint, rng: &mut dyn Rng, log: &mut StepLog) -> Result<()>;
    /// Exact successor distribution. Only available when every auxiliary
    /// conditional involved has finite support.
    fn successors(&self, z: &JointPoint) -> Result<Vec<(JointPoint, f64)>>;
    /// Ordered parts of a composition; empty for leaves.
    fn components(&self) -> Vec<Arc<dyn Transition>> {
        Vec::new()
    }
}

#[derive(Clone)]
pub struct AuxTerm {
    pub cond: Arc<dyn AuxiliaryConditional>,
    pub refresh: bool,
}

/// One iMCMC kernel: resample the refreshed auxiliaries, apply the involution,
/// accept with the joint density ratio times the Jacobian.
#[derive(Clone)]
pub struct ImcmcKernel {
    name: String,
    target: Arc<dyn PointDensity>,
    aux: Vec<AuxTerm>,
    involution: Arc<dyn Involution>,
    rule: AcceptanceRule,
    layout: Option<Layout>,
    unit_acceptance: bool,
}

impl ImcmcKernel {
    pub fn new(name: impl Into<String>, target: Arc<dyn PointDensity>, involution: Arc<dyn Involution>) -> Self {
        Self {
            name: name.into(),
            target,
            aux: Vec::new(),
            involution,
            rule: AcceptanceRule::MetropolisMin,
            layout: None,
            unit_acceptance: false,
        }
    }

    /// Auxiliary resampled before every move. Order matters: later
    /// conditionals may read slots written by earlier ones.
    pub fn refresh(mut self, cond: Arc<dyn AuxiliaryConditional>) -> Self {
        self.aux.push(AuxTerm { cond, refresh: true });
        self
    }

    /// Auxiliary that is part of the joint density but carried over.
    pub fn persistent(mut self, cond: Arc<dyn AuxiliaryConditional>) -> Self {
        self.aux.push(AuxTerm { cond, refresh: false });
        self
    }

    pub fn rule(mut self, rule: AcceptanceRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn layout(mut self, layout: Layout) -> Self {
        self.layout = Some(layout);
        self
    }

    /// Declares that every proposal is accepted. The ratio is still computed
    /// at each step and a deviation beyond rounding is reported as an error.
    pub fn unit_acceptance(mut self) -> Self {
        self.unit_acceptance = true;
        self
    }

    pub fn acceptance_rule(&self) -> AcceptanceRule {
        self.rule
    }

    pub fn involution(&self) -> &Arc<dyn Involution> {
        &self.involution
    }

    pub fn joint_log_density(&self, z: &JointPoint) -> f64 {
        let mut lp = self.target.log_density(z);
        for a in &self.aux {
            if lp == f64::NEG_INFINITY || lp.is_nan() {
                break;
            }
            lp += a.cond.log_pdf(z);
        }
        lp
    }

    /// Proposal and acceptance probability for an already refreshed point.
    pub fn propose(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let lp = self.joint_log_density(z);
        if lp == f64::NEG_INFINITY {
            return Err(Error::InvalidDensity(format!("`{}`: current point has zero density", self.name)));
        }
        let (zp, logdet) = self.involution.apply(z)?;
        if let Some(l) = &self.layout {
            l.check(&zp)
                .map_err(|e| Error::Config(format!("`{}` involution `{}`: {e}", self.name, self.involution.name())))?;
        }
        let lpp = self.joint_log_density(&zp);
        let prob = log_accept(self.rule, lp, lpp, logdet)?;
        Ok((zp, prob))
    }

    fn refreshed_points(&self, z: &JointPoint) -> Result<Vec<(JointPoint, f64)>> {
        let mut pts = vec![(z.clone(), 1.0)];
        for a in self.aux.iter().filter(|a| a.refresh) {
            let mut next = Vec::new();
            for (p, w) in &pts {
                let branch = a.cond.enumerate(p).ok_or_else(|| Error::NotEnumerable(a.cond.name()))?;
                next.extend(branch.into_iter().filter(|(_, q)| *q > 0.0).map(|(q, pq)| (q, w * pq)));
            }
            pts = next;
        }
        Ok(pts)
    }
}

impl Transition for ImcmcKernel {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn step(&self, z: &mut JointPoint, rng: &mut dyn Rng, log: &mut StepLog) -> Result<()> {
        if let Some(l) = &self.layout {
            l.check(z)?;
        }
        for a in self.aux.iter().filter(|a| a.refresh) {
            a.cond.sample(z, rng);
        }
        let (zp, prob) = self.propose(z)?;
        let accepted = if self.unit_acceptance {
            if prob < 1.0 - 1e-9 {
                return Err(Error::AcceptanceGuarantee { kernel: self.name.clone(), prob });
            }
            true
        } else {
            prob >= 1.0 || rng.random::<f64>() < prob
        };
        if accepted {
            *z = zp;
        }
        log.entries.push(Acceptance { prob, accepted });
        Ok(())
    }

    fn successors(&self, z: &JointPoint) -> Result<Vec<(JointPoint, f64)>> {
        let mut out = Vec::new();
        for (zr, w) in self.refreshed_points(z)? {
            let (zp, prob) = self.propose(&zr)?;
            if prob > 0.0 {
                out.push((zp, w * prob));
            }
            if prob < 1.0 {
                out.push((zr, w * (1.0 - prob)));
            }
        }
        Ok(out)
    }
}

/// Kernels applied in order. Each part preserves the joint target, so does the
/// sequence, but reversibility is generally lost.
#[derive(Clone)]
pub struct KernelComposition {
    name: String,
    parts: Vec<Arc<dyn Transition>>,
}

impl KernelComposition {
    pub fn new(name: impl Into<String>, parts: Vec<Arc<dyn Transition>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Config("empty kernel composition".into()));
        }
        Ok(Self { name: name.into(), parts })
    }
}

pub fn compose(name: impl Into<String>, parts: Vec<Arc<dyn Transition>>) -> Result<KernelComposition> {
    KernelComposition::new(name, parts)
}

fn point_key(z: &JointPoint) -> (Vec<u64>, Vec<u64>, Vec<i64>) {
    (
        z.x.iter().map(|a| a.to_bits()).collect(),
        z.v.iter().map(|a| a.to_bits()).collect(),
        z.tags.clone(),
    )
}

/// Sums the weights of bitwise-identical points.
pub fn merge_points(pts: Vec<(JointPoint, f64)>) -> Vec<(JointPoint, f64)> {
    let mut index: HashMap<_, usize> = HashMap::new();
    let mut out: Vec<(JointPoint, f64)> = Vec::new();
    for (p, w) in pts {
        match index.get(&point_key(&p)) {
            Some(&i) => out[i].1 += w,
            None => {
                index.insert(point_key(&p), out.len());
                out.push((p, w));
            }
        }
    }
    out
}

impl Transition for KernelComposition {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn step(&self, z: &mut JointPoint, rng: &mut dyn Rng, log: &mut StepLog) -> Result<()> {
        for p in &self.parts {
            p.step(z, rng, log)?;
        }
        Ok(())
    }

    fn successors(&self, z: &JointPoint) -> Result<Vec<(JointPoint, f64)>> {
        let mut dist = vec![(z.clone(), 1.0)];
        for p in &self.parts {
            let mut next = Vec::new();
            for (q, w) in &dist {
                next.extend(p.successors(q)?.into_iter().map(|(r, pr)| (r, w * pr)));
            }
            dist = merge_points(next);
        }
        Ok(dist)
    }

    fn components(&self) -> Vec<Arc<dyn Transition>> {
        self.parts.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn acceptance_examples() {
        use AcceptanceRule::*;
        assert_eq!(log_accept(MetropolisMin, -1.0, -1.0, 0.0).unwrap(), 1.0);
        assert_eq!(log_accept(Barker, -1.0, -1.0, 0.0).unwrap(), 0.5);
        let p = log_accept(MetropolisMin, (2.0f64 / 3.0).ln(), (1.0f64 / 3.0).ln(), 0.0).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);
        assert_eq!(log_accept(MetropolisMin, 0.0, f64::NEG_INFINITY, 0.0).unwrap(), 0.0);
        assert_eq!(log_accept(Barker, 0.0, f64::NEG_INFINITY, 3.0).unwrap(), 0.0);
        assert!(log_accept(MetropolisMin, f64::NAN, 0.0, 0.0).is_err());
        assert!(log_accept(Barker, 0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn barker_is_stable_for_large_ratios() {
        let hi = log_accept(AcceptanceRule::Barker, 0.0, 800.0, 0.0).unwrap();
        let lo = log_accept(AcceptanceRule::Barker, 800.0, 0.0, 0.0).unwrap();
        assert_eq!(hi, 1.0);
        assert!(lo >= 0.0 && lo < 1e-300);
    }

    #[test]
    fn empty_composition_is_rejected() {
        assert!(compose("c", Vec::new()).is_err());
    }
}
