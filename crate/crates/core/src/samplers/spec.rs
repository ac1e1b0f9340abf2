//! Sampler registry keyed by the `kind` strings used on the command line.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::density::{LogDensity, OnX, PointDensity};
use crate::error::{Error, Result};
use crate::kernel::{AuxiliaryConditional, Transition};
use crate::maps::{AffineMap, Cdf1d, ConstantMetric, CouplingMap, Leapfrog, LeapfrogConfig, DEFAULT_SHIFT};
use crate::point::JointPoint;

use super::conditionals::GaussianBlock;
use super::directional::{irr_nice_mc, nice_mc, persistent_hmc, DEFAULT_ALPHA};
use super::gibbs::{make_gibbs, Scan};
use super::hamiltonian::{hmc, neutra_affine, rmhmc};
use super::irr_mala::make_irr_mala;
use super::lifted::guided_walk;
use super::look_ahead::make_look_ahead;
use super::mh::{mala, rwm};
use super::mtm::make_multiple_try;
use super::proposal::GaussianRw;
use super::transdimensional::{make_transdimensional, uniform_choice, JumpMode, ModelSpace};
use super::cdf::make_cdf_deterministic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SamplerKind {
    Rwm,
    Mala,
    IrrMala,
    Hmc,
    Rmhmc,
    Neutra,
    NiceMc,
    L2hmc,
    IrrNiceMc,
    PersistentHmc,
    LookAhead,
    Mtm,
    GuidedWalk,
    Cdf,
    Gibbs,
    Rjmcmc,
    Nrj,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 17] = [
        Self::Rwm,
        Self::Mala,
        Self::IrrMala,
        Self::Hmc,
        Self::Rmhmc,
        Self::Neutra,
        Self::NiceMc,
        Self::L2hmc,
        Self::IrrNiceMc,
        Self::PersistentHmc,
        Self::LookAhead,
        Self::Mtm,
        Self::GuidedWalk,
        Self::Cdf,
        Self::Gibbs,
        Self::Rjmcmc,
        Self::Nrj,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Rwm => "rwm",
            Self::Mala => "mala",
            Self::IrrMala => "irr_mala",
            Self::Hmc => "hmc",
            Self::Rmhmc => "rmhmc",
            Self::Neutra => "neutra",
            Self::NiceMc => "nice_mc",
            Self::L2hmc => "l2hmc",
            Self::IrrNiceMc => "irr_nice_mc",
            Self::PersistentHmc => "persistent_hmc",
            Self::LookAhead => "look_ahead",
            Self::Mtm => "mtm",
            Self::GuidedWalk => "guided_walk",
            Self::Cdf => "cdf",
            Self::Gibbs => "gibbs",
            Self::Rjmcmc => "rjmcmc",
            Self::Nrj => "nrj",
        }
    }

    /// Parameters and their defaults.
    pub fn defaults(self) -> &'static [(&'static str, f64)] {
        const COUPLING: &[(&str, f64)] = &[("eps", 0.25), ("k", 4.0), ("jump", 4.0), ("beta", 1.0)];
        match self {
            Self::Rwm | Self::GuidedWalk => &[("scale", 1.0)],
            Self::Mala | Self::IrrMala => &[("eps", 0.1)],
            Self::Hmc => &[("eps", 0.1), ("k", 10.0)],
            Self::Rmhmc => &[("eps", 0.1), ("k", 10.0), ("metric_scale", 1.0)],
            Self::Neutra => &[("eps", 0.1), ("k", 10.0), ("shift", 0.0), ("scale", 1.0)],
            Self::NiceMc => COUPLING,
            Self::L2hmc => &[("eps", 0.25), ("k", 4.0), ("jump", 4.0), ("beta", 1.0), ("c", 0.1)],
            Self::IrrNiceMc => &[("eps", 0.25), ("k", 4.0), ("jump", 4.0), ("beta", 1.0), ("alpha", DEFAULT_ALPHA)],
            Self::PersistentHmc => &[("eps", 0.1), ("k", 10.0), ("alpha", 0.5)],
            Self::LookAhead => &[("eps", 0.1), ("k", 5.0), ("lookahead", 3.0), ("alpha", 0.5)],
            Self::Mtm => &[("scale", 1.0), ("tries", 5.0)],
            Self::Cdf => &[("shift", DEFAULT_SHIFT)],
            Self::Gibbs => &[("scan", 1.0)],
            Self::Rjmcmc => &[],
            Self::Nrj => &[("tau", 0.5)],
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        if s == "mh" {
            return Ok(Self::Rwm);
        }
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown sampler kind `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub params: BTreeMap<String, f64>,
}

impl SamplerSpec {
    pub fn new(kind: SamplerKind) -> Self {
        Self { kind, params: BTreeMap::new() }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn get(&self, name: &str) -> f64 {
        self.params.get(name).copied().unwrap_or_else(|| {
            self.kind.defaults().iter().find(|(n, _)| *n == name).map(|p| p.1).unwrap_or(f64::NAN)
        })
    }

    fn count(&self, name: &str) -> Result<usize> {
        let a = self.get(name);
        if a < 1.0 || a.fract() != 0.0 || !a.is_finite() {
            return Err(Error::Config(format!("{name} = {a} must be a positive integer")));
        }
        Ok(a as usize)
    }

    fn positive(&self, name: &str) -> Result<f64> {
        let a = self.get(name);
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Config(format!("{name} = {a} must be positive")));
        }
        Ok(a)
    }

    /// Unknown names and out-of-range values are configuration errors.
    pub fn validate(&self) -> Result<()> {
        let known = self.kind.defaults();
        for n in self.params.keys() {
            if !known.iter().any(|(k, _)| k == n) {
                return Err(Error::Config(format!("`{}` has no parameter `{n}`", self.kind)));
            }
        }
        for (n, _) in known {
            let a = self.get(n);
            let ok = match *n {
                "alpha" => (0.0..=1.0).contains(&a),
                "tau" => (0.0..1.0).contains(&a),
                "shift" => a.is_finite(),
                "scan" => [0.0, 1.0, 2.0].contains(&a),
                "k" | "tries" | "lookahead" => a >= 1.0 && a.fract() == 0.0,
                "c" => a.is_finite(),
                _ => a > 0.0 && a.is_finite(),
            };
            if !ok {
                return Err(Error::Config(format!("{n} = {a} out of range for `{}`", self.kind)));
            }
        }
        Ok(())
    }
}

/// What a target offers to the builders.
#[derive(Clone)]
pub struct TargetHandle {
    pub density: Arc<dyn LogDensity>,
    pub cdf: Option<Arc<dyn Cdf1d>>,
    /// Exact full conditionals, one per coordinate, writing v[0].
    pub conditionals: Option<Vec<Arc<dyn AuxiliaryConditional>>>,
    pub models: Option<Arc<ModelSpace>>,
}

impl TargetHandle {
    pub fn new(density: Arc<dyn LogDensity>) -> Self {
        Self { density, cdf: None, conditionals: None, models: None }
    }
}

/// A built sampler with the point shape it runs on.
pub struct Built {
    pub transition: Arc<dyn Transition>,
    pub density: Arc<dyn PointDensity>,
    v_len: usize,
    tags: Vec<i64>,
}

impl Built {
    /// Joint starting point around a target-block value.
    pub fn init(&self, x: Vec<f64>) -> JointPoint {
        JointPoint { x, v: vec![0.0; self.v_len], tags: self.tags.clone() }
    }
}

/// Density of the model-tagged point used by transdimensional runs.
struct TaggedModels(Arc<ModelSpace>);

impl PointDensity for TaggedModels {
    fn log_density(&self, z: &JointPoint) -> f64 {
        match usize::try_from(z.tags[0]).ok().and_then(|k| self.0.models.get(k)) {
            Some(m) if m.dim == z.x.len() => (m.log_density)(&z.x),
            _ => f64::NEG_INFINITY,
        }
    }
}

pub fn build_sampler(spec: &SamplerSpec, target: &TargetHandle) -> Result<Built> {
    use SamplerKind::*;
    spec.validate()?;
    let p = target.density.clone();
    let d = p.dim();
    let on_x: Arc<dyn PointDensity> = Arc::new(OnX(p.clone()));
    let lf = || LeapfrogConfig::new(spec.get("eps"), spec.count("k")?);
    let coupling = || -> Result<Arc<CouplingMap>> {
        Ok(Arc::new(CouplingMap::jump_leapfrog(
            p.clone(),
            spec.get("jump"),
            spec.get("beta"),
            spec.positive("eps")?,
            spec.count("k")?,
        )))
    };
    let plain = |t: Arc<dyn Transition>, v_len: usize, tags: Vec<i64>| Built { transition: t, density: on_x.clone(), v_len, tags };
    Ok(match spec.kind {
        Rwm => plain(Arc::new(rwm(p.clone(), spec.positive("scale")?)), d, vec![]),
        Mala => plain(Arc::new(mala(p.clone(), spec.positive("eps")?)), d, vec![]),
        IrrMala => plain(Arc::new(make_irr_mala(p.clone(), spec.positive("eps")?)?), d, vec![1]),
        Hmc => plain(Arc::new(hmc(p.clone(), lf()?)), d, vec![]),
        Rmhmc => {
            let metric = Arc::new(ConstantMetric::scaled_identity(d, spec.positive("metric_scale")?));
            plain(Arc::new(rmhmc(p.clone(), metric, lf()?)), d, vec![])
        }
        Neutra => {
            let map = AffineMap::new(vec![spec.get("shift"); d], vec![spec.positive("scale")?; d])?;
            plain(Arc::new(neutra_affine(p.clone(), map, lf()?)?), d, vec![])
        }
        NiceMc => plain(Arc::new(nice_mc(p.clone(), coupling()?, true)), d, vec![1]),
        L2hmc => {
            let m = CouplingMap::jump_leapfrog_affine(
                p.clone(),
                spec.get("jump"),
                spec.get("beta"),
                spec.positive("eps")?,
                spec.count("k")?,
                spec.get("c"),
            );
            plain(Arc::new(nice_mc(p.clone(), Arc::new(m), false)), d, vec![1])
        }
        IrrNiceMc => plain(Arc::new(irr_nice_mc(p.clone(), coupling()?, spec.get("alpha"))?), 2 * d, vec![1]),
        PersistentHmc => plain(Arc::new(persistent_hmc(p.clone(), lf()?, spec.get("alpha"))?), 2 * d, vec![1]),
        LookAhead => {
            let alpha = spec.get("alpha");
            let refresh: Option<Arc<dyn AuxiliaryConditional>> =
                (alpha > 0.0).then(|| Arc::new(GaussianBlock::autoregressive(d, alpha)) as _);
            let flow = Arc::new(Leapfrog::new(p.clone(), lf()?));
            let t = make_look_ahead(p.clone(), Arc::new(GaussianBlock::momentum(d, 1.0)), refresh, flow, spec.count("lookahead")?)?;
            plain(Arc::new(t), 2 * d, vec![1])
        }
        Mtm => {
            let k = spec.count("tries")?;
            let t = make_multiple_try(p.clone(), Arc::new(GaussianRw { sd: spec.positive("scale")? }), None, k)?;
            plain(Arc::new(t), (2 * k - 1) * d, vec![0])
        }
        GuidedWalk => plain(Arc::new(guided_walk(p.clone(), spec.positive("scale")?)?), 1, vec![1]),
        Cdf => plain(Arc::new(make_cdf_deterministic(target.cdf.clone(), spec.get("shift"))?), 0, vec![]),
        Gibbs => {
            let conds = target
                .conditionals
                .clone()
                .ok_or_else(|| Error::Config("gibbs needs a target with known full conditionals".into()))?;
            let (scan, tags) = match spec.get("scan") as i64 {
                0 => (Scan::Random, vec![0]),
                1 => (Scan::Systematic, vec![]),
                _ => (Scan::PersistentSystematic, vec![0, 1]),
            };
            plain(make_gibbs(p.clone(), conds, scan)?, 1, tags)
        }
        Rjmcmc | Nrj => {
            let space = target
                .models
                .clone()
                .ok_or_else(|| Error::Config(format!("{} needs a model-space target", spec.kind)))?;
            let (mode, tags) = if spec.kind == Rjmcmc {
                (JumpMode::Reversible { choice: uniform_choice(space.models.len()) }, vec![0, 0])
            } else {
                (JumpMode::NonReversible { tau: spec.get("tau") }, vec![0, 1, 0])
            };
            let t = make_transdimensional(space.clone(), mode)?;
            Built { transition: t, density: Arc::new(TaggedModels(space)), v_len: 0, tags }
        }
    })
}
