//! Named targets available from the command line.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use imcmc::samplers::{nested_gaussians, GaussianBlock, TargetHandle};
use imcmc::targets::{load_dataset, synthetic_dataset, Bivariate, Exponential, KnownDataset, LogisticPosterior, Mog2, StdNormal, Uniform01};
use imcmc::AuxiliaryConditional;

use crate::CliError;

pub const TARGETS: &[&str] = &["mog2", "normal", "bivariate", "exponential", "uniform", "logistic", "nested"];

/// Numeric keys read by targets rather than samplers.
pub const TARGET_PARAMS: &[&str] = &["dim", "rho", "rate", "rows", "cols", "data_seed", "rw_sd"];

/// A target plus the point its chains start from.
pub struct Target {
    pub handle: TargetHandle,
    pub init: Vec<f64>,
    /// Whether x can change length (model-space targets).
    pub variable_dim: bool,
}

fn param(p: &BTreeMap<String, f64>, name: &str, default: f64) -> f64 {
    p.get(name).copied().unwrap_or(default)
}

fn count(p: &BTreeMap<String, f64>, name: &str, default: usize) -> Result<usize, CliError> {
    let a = param(p, name, default as f64);
    if a < 1.0 || a.fract() != 0.0 {
        return Err(CliError::Config(format!("`{name}` must be a positive integer, got {a}")));
    }
    Ok(a as usize)
}

/// Exact full conditionals of the bivariate normal, writing v[0].
pub fn bivariate_conditionals(b: Bivariate) -> Vec<Arc<dyn AuxiliaryConditional>> {
    let sd = b.conditional(0.0).1.sqrt();
    (0..2)
        .map(|k| {
            Arc::new(GaussianBlock::new(format!("x{k} | rest"), 0, 1, move |z| vec![b.conditional(z.x[1 - k]).0], move |_| sd))
                as Arc<dyn AuxiliaryConditional>
        })
        .collect()
}

pub fn make_target(name: &str, p: &BTreeMap<String, f64>, dataset: Option<&Path>) -> Result<Target, CliError> {
    let fixed = |handle, init| Ok(Target { handle, init, variable_dim: false });
    match name {
        "mog2" => fixed(TargetHandle::new(Arc::new(Mog2::default())), vec![0.0, 0.0]),
        "normal" => {
            let d = count(p, "dim", 2)?;
            let mut h = TargetHandle::new(Arc::new(StdNormal::new(d)));
            if d == 1 {
                h.cdf = Some(Arc::new(StdNormal::new(1)));
            }
            fixed(h, vec![0.0; d])
        }
        "bivariate" => {
            let rho = param(p, "rho", 0.8);
            if !(rho.abs() < 1.0) {
                return Err(CliError::Config(format!("rho = {rho} must lie in (-1, 1)")));
            }
            let b = Bivariate { rho };
            let mut h = TargetHandle::new(Arc::new(b));
            h.conditionals = Some(bivariate_conditionals(b));
            fixed(h, vec![0.0, 0.0])
        }
        "exponential" => {
            let rate = param(p, "rate", 1.0);
            if !(rate > 0.0) {
                return Err(CliError::Config(format!("rate = {rate} must be positive")));
            }
            let e = Exponential { rate };
            let mut h = TargetHandle::new(Arc::new(e));
            h.cdf = Some(Arc::new(e));
            fixed(h, vec![1.0 / rate])
        }
        "uniform" => {
            let mut h = TargetHandle::new(Arc::new(Uniform01));
            h.cdf = Some(Arc::new(Uniform01));
            fixed(h, vec![0.5])
        }
        "logistic" => {
            let data = match dataset {
                Some(path) => {
                    if !path.exists() {
                        return Err(CliError::Config(format!("dataset {} not found", path.display())));
                    }
                    load_dataset(path, KnownDataset::from_path(path)).map_err(|e| CliError::Config(e.to_string()))?
                }
                None => synthetic_dataset(count(p, "rows", 100)?, count(p, "cols", 5)?, param(p, "data_seed", 0.0) as u64),
            };
            let d = data.cols() + 1;
            fixed(TargetHandle::new(Arc::new(LogisticPosterior::new(data))), vec![0.0; d])
        }
        "nested" => {
            let space = nested_gaussians(param(p, "rw_sd", 1.0)).map_err(|e| CliError::Config(e.to_string()))?;
            let mut h = TargetHandle::new(Arc::new(StdNormal::new(1)));
            h.models = Some(Arc::new(space));
            Ok(Target { handle: h, init: vec![0.0], variable_dim: true })
        }
        other => Err(CliError::Config(format!("unknown target `{other}` (one of {})", TARGETS.join(", ")))),
    }
}
