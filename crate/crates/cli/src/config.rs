//! Run configuration: a flat TOML table merged with command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use imcmc::samplers::SamplerKind;

use crate::targets::TARGET_PARAMS;
use crate::CliError;

pub const DEFAULT_CHAINS: usize = 100;
pub const DEFAULT_STEPS: usize = 20_000;
pub const DEFAULT_BURN_IN: usize = 1000;
pub const SEED_ENV: &str = "IMCMC_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// Per-chain trace CSVs plus the summary.
    Csv,
    /// Summary only.
    Summary,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub kind: SamplerKind,
    pub params: BTreeMap<String, f64>,
    pub target: String,
    pub target_params: BTreeMap<String, f64>,
    pub dataset: Option<PathBuf>,
    pub chains: usize,
    pub steps: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    pub jobs: Option<usize>,
}

/// Raw key/value pairs before validation. Later sources override earlier ones.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub strings: BTreeMap<String, String>,
    pub numbers: BTreeMap<String, f64>,
}

const STRING_KEYS: &[&str] = &["kind", "target", "dataset", "out", "format"];
const COUNT_KEYS: &[&str] = &["chains", "steps", "burn_in", "seed", "jobs"];

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text.parse().map_err(|e| CliError::Config(format!("config: {e}")))?;
        let mut s = Self::default();
        for (k, v) in table {
            let key = k.replace('-', "_");
            match v {
                toml::Value::String(a) => s.set_str(&key, a),
                toml::Value::Integer(a) => s.set_num(&key, a as f64),
                toml::Value::Float(a) => s.set_num(&key, a),
                other => return Err(CliError::Config(format!("config key `{k}`: unsupported value {other}"))),
            }
        }
        Ok(s)
    }

    pub fn set_str(&mut self, key: &str, value: impl Into<String>) {
        self.strings.insert(key.to_string(), value.into());
    }

    pub fn set_num(&mut self, key: &str, value: f64) {
        self.numbers.insert(key.to_string(), value);
    }

    pub fn merge(&mut self, other: Settings) {
        self.strings.extend(other.strings);
        self.numbers.extend(other.numbers);
    }

    fn count(&self, key: &str) -> Result<Option<u64>, CliError> {
        match self.numbers.get(key) {
            None => Ok(None),
            Some(&a) if a >= 0.0 && a.fract() == 0.0 && a <= u64::MAX as f64 => Ok(Some(a as u64)),
            Some(a) => Err(CliError::Config(format!("`{key}` must be a non-negative integer, got {a}"))),
        }
    }

    /// Sampler-independent part of the configuration; sampler parameters are
    /// returned separately for the caller to place.
    fn common(&self) -> Result<Common, CliError> {
        for k in self.strings.keys() {
            if !STRING_KEYS.contains(&k.as_str()) {
                return Err(CliError::Config(format!("unknown text key `{k}`")));
            }
        }
        let seed = match self.count("seed")? {
            Some(s) => s,
            None => seed_from_env()?,
        };
        let chains = self.count("chains")?.map(|a| a as usize).unwrap_or(DEFAULT_CHAINS);
        let steps = self.count("steps")?.map(|a| a as usize).unwrap_or(DEFAULT_STEPS);
        // without an explicit burn-in, short runs discard a tenth of their steps
        let burn_in = self.count("burn_in")?.map(|a| a as usize).unwrap_or(DEFAULT_BURN_IN.min(steps / 10));
        if chains == 0 {
            return Err(CliError::Config("chains must be at least 1".into()));
        }
        if steps <= burn_in {
            return Err(CliError::Config(format!("steps ({steps}) must exceed burn_in ({burn_in})")));
        }
        let jobs = self.count("jobs")?.map(|a| a as usize);
        if jobs == Some(0) {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        let format = match self.strings.get("format").map(String::as_str) {
            None | Some("csv") => Format::Csv,
            Some("summary") => Format::Summary,
            Some(f) => return Err(CliError::Config(format!("unknown format `{f}` (csv or summary)"))),
        };
        let mut target_params = BTreeMap::new();
        let mut rest = BTreeMap::new();
        for (k, v) in &self.numbers {
            if COUNT_KEYS.contains(&k.as_str()) {
                continue;
            }
            if TARGET_PARAMS.contains(&k.as_str()) {
                target_params.insert(k.clone(), *v);
            } else {
                rest.insert(k.clone(), *v);
            }
        }
        Ok(Common {
            target: self.strings.get("target").cloned().unwrap_or_else(|| "mog2".into()),
            target_params,
            dataset: self.strings.get("dataset").map(PathBuf::from),
            chains,
            steps,
            burn_in,
            seed,
            out: self.strings.get("out").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("imcmc-out")),
            format,
            jobs,
            sampler_params: rest,
        })
    }

    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        let c = self.common()?;
        let kind: SamplerKind = self
            .strings
            .get("kind")
            .ok_or_else(|| CliError::Config("no sampler kind given".into()))?
            .parse()
            .map_err(|e: imcmc::Error| CliError::Config(e.to_string()))?;
        Ok(RunConfig {
            kind,
            params: c.sampler_params,
            target: c.target,
            target_params: c.target_params,
            dataset: c.dataset,
            chains: c.chains,
            steps: c.steps,
            burn_in: c.burn_in,
            seed: c.seed,
            out: c.out,
            format: c.format,
            jobs: c.jobs,
        })
    }

    /// Configurations for a benchmark: one per sampler kind, sharing every
    /// other setting. A sampler parameter applies to the kinds that accept it.
    pub fn bench_configs(&self, kinds: &[SamplerKind]) -> Result<Vec<RunConfig>, CliError> {
        let c = self.common()?;
        for k in c.sampler_params.keys() {
            if !kinds.iter().any(|kind| kind.defaults().iter().any(|(n, _)| n == k)) {
                return Err(CliError::Config(format!("no benchmarked sampler takes `{k}`")));
            }
        }
        Ok(kinds
            .iter()
            .map(|&kind| RunConfig {
                kind,
                params: c
                    .sampler_params
                    .iter()
                    .filter(|(k, _)| kind.defaults().iter().any(|(n, _)| n == k))
                    .map(|(k, v)| (k.clone(), *v))
                    .collect(),
                target: c.target.clone(),
                target_params: c.target_params.clone(),
                dataset: c.dataset.clone(),
                chains: c.chains,
                steps: c.steps,
                burn_in: c.burn_in,
                seed: c.seed,
                out: c.out.clone(),
                format: c.format,
                jobs: c.jobs,
            })
            .collect())
    }
}

struct Common {
    target: String,
    target_params: BTreeMap<String, f64>,
    dataset: Option<PathBuf>,
    chains: usize,
    steps: usize,
    burn_in: usize,
    seed: u64,
    out: PathBuf,
    format: Format,
    jobs: Option<usize>,
    sampler_params: BTreeMap<String, f64>,
}

fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Config(format!("{SEED_ENV}=`{s}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let mut s = Settings::from_toml("kind = \"hmc\"\nsteps = 500\nburn_in = 100\neps = 0.2\nseed = 3").unwrap();
        let mut flags = Settings::default();
        flags.set_num("eps", 0.05);
        s.merge(flags);
        let c = s.run_config().unwrap();
        assert_eq!(c.params["eps"], 0.05);
        assert_eq!((c.steps, c.burn_in, c.seed, c.chains), (500, 100, 3, DEFAULT_CHAINS));
    }

    #[test]
    fn invalid_settings_are_config_errors() {
        for text in [
            "kind = \"hmc\"\nsteps = 10\nburn_in = 10",
            "kind = \"hmc\"\nsteps = 0",
            "kind = \"hmc\"\nchains = 0",
            "kind = \"hmc\"\nsteps = 2.5",
            "kind = \"nope\"",
            "kind = \"hmc\"\ncolour = \"red\"",
            "kind = [1]",
        ] {
            let r = Settings::from_toml(text).and_then(|s| s.run_config());
            assert!(matches!(r, Err(CliError::Config(_))), "{text}");
        }
    }

    #[test]
    fn target_keys_are_separated() {
        let c = Settings::from_toml("kind = \"rwm\"\ntarget = \"normal\"\ndim = 3\nscale = 0.5\nseed = 1").unwrap().run_config().unwrap();
        assert_eq!(c.target_params["dim"], 3.0);
        assert_eq!(c.params["scale"], 0.5);
    }
}
