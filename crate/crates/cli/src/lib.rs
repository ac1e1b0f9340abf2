//! Library side of the `imcmc` command-line tool.

use std::fmt;
use std::path::Path;

use imcmc::diagnostics::{ess_batch_means_multi, EssReport};

pub mod bench;
pub mod config;
pub mod output;
pub mod run;
pub mod targets;
pub mod verify;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or inputs.
    Config(String),
    /// A verification check failed.
    Verification(String),
    /// Failure while sampling or writing output.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Verification(_) => 1,
            Self::Config(_) | Self::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Verification(m) => write!(f, "verification failed: {m}"),
            Self::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Reads the `x_*` columns of a trace CSV (every column if there are none)
/// after dropping `burn_in` rows.
pub fn read_trace(path: &Path, burn_in: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let bad = |m: String| CliError::Config(format!("{}: {m}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let mut cols: Vec<usize> = (0..header.len()).filter(|&i| header[i].starts_with("x_")).collect();
    if cols.is_empty() {
        cols = (0..header.len()).collect();
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let row = cols
            .iter()
            .map(|&j| {
                rec.get(j)
                    .filter(|s| !s.trim().is_empty())
                    .ok_or_else(|| bad(format!("row {}: missing `{}`", line + 1, &header[j])))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| bad(format!("row {}: {e}", line + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if burn_in >= rows.len() {
        return Err(bad(format!("burn-in {burn_in} leaves no rows out of {}", rows.len())));
    }
    Ok(rows.split_off(burn_in))
}

pub fn ess_of_trace(path: &Path, burn_in: usize) -> Result<EssReport, CliError> {
    let rows = read_trace(path, burn_in)?;
    ess_batch_means_multi(&rows).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
