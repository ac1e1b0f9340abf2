//! Running chains and summarizing them.

use std::io::Write;
use std::path::{Path, PathBuf};

use imcmc::diagnostics::{acceptance_rate, ess_batch_means_multi, EssReport};
use imcmc::samplers::{build_sampler, SamplerSpec};
use imcmc::{run_chains, ChainTrace};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::output::write_atomic;
use crate::targets::make_target;
use crate::CliError;

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and sample standard deviation (0 for a single value).
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainSummary {
    pub ess: f64,
    pub iact: f64,
    pub ess_per_sec: Option<f64>,
    pub accept_rate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub kind: String,
    pub target: String,
    pub params: std::collections::BTreeMap<String, f64>,
    pub chains: usize,
    pub steps: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Draws per chain after burn-in.
    pub n: usize,
    pub dims: usize,
    pub ess: MeanStd,
    pub iact: MeanStd,
    pub ess_per_sec: MeanStd,
    pub accept_rate: MeanStd,
    /// Fraction of post-burn-in draws in each model (model-space targets).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_probs: Option<Vec<f64>>,
    pub per_chain: Vec<ChainSummary>,
}

pub struct RunResult {
    pub summary: Summary,
    pub traces: Vec<ChainTrace>,
}

/// Series the ESS is computed on: x itself, or the model index when x
/// changes dimension.
fn ess_rows(t: &ChainTrace, burn_in: usize, variable_dim: bool) -> Vec<Vec<f64>> {
    if variable_dim {
        t.tags[burn_in..].iter().map(|g| vec![g[0] as f64]).collect()
    } else {
        t.x[burn_in..].to_vec()
    }
}

fn chain_summary(t: &ChainTrace, burn_in: usize, variable_dim: bool) -> Result<(ChainSummary, EssReport), CliError> {
    let rows = ess_rows(t, burn_in, variable_dim);
    let report = ess_batch_means_multi(&rows)
        .map_err(|e| CliError::Runtime(format!("ESS: {e}")))?
        .with_elapsed(t.elapsed.as_secs_f64());
    let accept_rate = acceptance_rate(&t.accepted[burn_in..]).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok((ChainSummary { ess: report.ess, iact: report.iact, ess_per_sec: report.ess_per_sec, accept_rate }, report))
}

pub fn run(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let target = make_target(&cfg.target, &cfg.target_params, cfg.dataset.as_deref())?;
    let mut spec = SamplerSpec::new(cfg.kind);
    for (k, v) in &cfg.params {
        spec = spec.with(k, *v);
    }
    let built = build_sampler(&spec, &target.handle).map_err(|e| CliError::Config(e.to_string()))?;
    let inits = vec![built.init(target.init.clone()); cfg.chains];
    let traces = run_chains(built.transition.as_ref(), built.density.as_ref(), &inits, cfg.steps, cfg.seed, cfg.jobs)
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut per_chain = Vec::with_capacity(traces.len());
    let mut dims = 0;
    for t in &traces {
        let (c, r) = chain_summary(t, cfg.burn_in, target.variable_dim)?;
        dims = r.dims;
        per_chain.push(c);
    }
    let pick = |f: fn(&ChainSummary) -> f64| MeanStd::of(&per_chain.iter().map(f).collect::<Vec<_>>());
    let model_probs = target.handle.models.as_ref().map(|m| {
        let mut counts = vec![0usize; m.models.len()];
        for t in &traces {
            for g in &t.tags[cfg.burn_in..] {
                counts[g[0] as usize] += 1;
            }
        }
        let total: usize = counts.iter().sum();
        counts.into_iter().map(|c| c as f64 / total as f64).collect()
    });
    let summary = Summary {
        kind: cfg.kind.to_string(),
        target: cfg.target.clone(),
        params: cfg.kind.defaults().iter().map(|(k, v)| (k.to_string(), *v)).chain(spec.params.clone()).collect(),
        chains: cfg.chains,
        steps: cfg.steps,
        burn_in: cfg.burn_in,
        seed: cfg.seed,
        n: cfg.steps - cfg.burn_in,
        dims,
        ess: pick(|c| c.ess),
        iact: pick(|c| c.iact),
        ess_per_sec: pick(|c| c.ess_per_sec.unwrap_or(f64::NAN)),
        accept_rate: pick(|c| c.accept_rate),
        model_probs,
        per_chain,
    };
    Ok(RunResult { summary, traces })
}

/// Trace CSV: `step,accepted,x_0,...`, one row per post-burn-in step. Steps
/// count from the start of the run; missing coordinates are left empty.
pub fn write_trace(t: &ChainTrace, burn_in: usize, w: &mut impl Write) -> std::io::Result<()> {
    let width = t.x.iter().map(Vec::len).max().unwrap_or(0);
    let mut header = String::from("step,accepted");
    for i in 0..width {
        header.push_str(&format!(",x_{i}"));
    }
    writeln!(w, "{header}")?;
    for i in burn_in..t.len() {
        write!(w, "{},{}", i, u8::from(t.accepted[i]))?;
        for j in 0..width {
            match t.x[i].get(j) {
                Some(a) => write!(w, ",{a}")?,
                None => write!(w, ",")?,
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn trace_path(dir: &Path, chain: usize) -> PathBuf {
    dir.join(format!("chain_{chain:03}.csv"))
}

/// Writes traces (in csv format) and `summary.json` under `cfg.out`.
pub fn write_outputs(cfg: &RunConfig, res: &RunResult) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::Runtime(format!("{}: {e}", cfg.out.display())))?;
    let mut written = Vec::new();
    if cfg.format == Format::Csv {
        for (i, t) in res.traces.iter().enumerate() {
            let path = trace_path(&cfg.out, i);
            write_atomic(&path, |w| write_trace(t, cfg.burn_in, w))?;
            written.push(path);
        }
    }
    let path = cfg.out.join("summary.json");
    write_atomic(&path, |w| {
        serde_json::to_writer_pretty(&mut *w, &res.summary)?;
        writeln!(w)
    })?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_of_values() {
        let m = MeanStd::of(&[1.0, 2.0, 3.0]);
        assert_eq!(m.mean, 2.0);
        assert!((m.std - 1.0).abs() < 1e-15);
        assert_eq!(MeanStd::of(&[4.0]).std, 0.0);
    }

    #[test]
    fn trace_format() {
        let t = ChainTrace {
            x: vec![vec![0.5], vec![1.0, 2.0]],
            tags: vec![vec![0], vec![1]],
            accepted: vec![true, false],
            ..Default::default()
        };
        let mut out = Vec::new();
        write_trace(&t, 0, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "step,accepted,x_0,x_1\n0,1,0.5,\n1,0,1,2\n");
    }
}
