//! ESS and ESS/sec comparison across sampler kinds.

use imcmc::samplers::SamplerKind;
use serde::Serialize;

use crate::config::RunConfig;
use crate::run::run;
use crate::CliError;

pub const DEFAULT_KINDS: &[SamplerKind] =
    &[SamplerKind::Mala, SamplerKind::IrrMala, SamplerKind::NiceMc, SamplerKind::IrrNiceMc];

pub const COLUMNS: &[&str] = &[
    "sampler",
    "target",
    "chains",
    "n",
    "ess_mean",
    "ess_std",
    "ess_per_sec_mean",
    "ess_per_sec_std",
    "accept_rate_mean",
];

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub sampler: String,
    pub target: String,
    pub chains: usize,
    pub n: usize,
    pub ess_mean: f64,
    pub ess_std: f64,
    pub ess_per_sec_mean: f64,
    pub ess_per_sec_std: f64,
    pub accept_rate_mean: f64,
}

impl BenchRow {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.sampler,
            self.target,
            self.chains,
            self.n,
            self.ess_mean,
            self.ess_std,
            self.ess_per_sec_mean,
            self.ess_per_sec_std,
            self.accept_rate_mean
        )
    }
}

pub fn bench(configs: &[RunConfig]) -> Result<Vec<BenchRow>, CliError> {
    configs
        .iter()
        .map(|cfg| {
            let s = run(cfg)?.summary;
            Ok(BenchRow {
                sampler: s.kind,
                target: s.target,
                chains: s.chains,
                n: s.n,
                ess_mean: s.ess.mean,
                ess_std: s.ess.std,
                ess_per_sec_mean: s.ess_per_sec.mean,
                ess_per_sec_std: s.ess_per_sec.std,
                accept_rate_mean: s.accept_rate.mean,
            })
        })
        .collect()
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = COLUMNS.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv());
        s.push('\n');
    }
    s
}
