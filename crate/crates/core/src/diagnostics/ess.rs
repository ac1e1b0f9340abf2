use serde::Serialize;

use crate::error::{Error, Result};

/// Batch-means effective sample size. `ess` and `iact` refer to the worst
/// dimension.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EssReport {
    pub ess: f64,
    pub iact: f64,
    pub n: usize,
    pub dims: usize,
    pub ess_per_sec: Option<f64>,
}

impl EssReport {
    pub fn with_elapsed(mut self, secs: f64) -> Self {
        self.ess_per_sec = (secs > 0.0).then(|| self.ess / secs);
        self
    }
}

/// Largest b with b³ ≤ n.
pub fn icbrt(n: u128) -> u128 {
    let mut b = (n as f64).cbrt().floor() as u128;
    while (b + 1).pow(3) <= n {
        b += 1;
    }
    while b.pow(3) > n {
        b -= 1;
    }
    b
}

fn iact(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 27 {
        return Err(Error::Degenerate(format!("{n} samples, need at least 27")));
    }
    // batch size ⌊n^(2/3)⌋, ⌊n^(1/3)⌋ batches, trailing remainder dropped
    let m = icbrt((n as u128).pow(2)) as usize;
    let b = icbrt(n as u128) as usize;
    let mean = series.iter().sum::<f64>() / n as f64;
    let var = series.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if !(var > 0.0) {
        return Err(Error::Degenerate("zero sample variance".into()));
    }
    let bm: Vec<f64> = series[..b * m].chunks(m).map(|c| c.iter().sum::<f64>() / m as f64).collect();
    let bmean = bm.iter().sum::<f64>() / b as f64;
    let bvar = bm.iter().map(|a| (a - bmean).powi(2)).sum::<f64>() / (b - 1) as f64;
    Ok(m as f64 * bvar / var)
}

pub fn ess_batch_means(series: &[f64]) -> Result<EssReport> {
    let r = iact(series)?;
    Ok(EssReport { ess: series.len() as f64 / r, iact: r, n: series.len(), dims: 1, ess_per_sec: None })
}

/// Rows are draws; the report carries the minimum ESS over coordinates.
pub fn ess_batch_means_multi(samples: &[Vec<f64>]) -> Result<EssReport> {
    let dims = samples.first().map(|r| r.len()).unwrap_or(0);
    if dims == 0 {
        return Err(Error::Degenerate("no samples".into()));
    }
    let mut worst = 0.0f64;
    for j in 0..dims {
        let col: Vec<f64> = samples.iter().map(|r| r[j]).collect();
        worst = worst.max(iact(&col)?);
    }
    let n = samples.len();
    Ok(EssReport { ess: n as f64 / worst, iact: worst, n, dims, ess_per_sec: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_roots() {
        assert_eq!(icbrt(26), 2);
        assert_eq!(icbrt(27), 3);
        assert_eq!(icbrt(100_000), 46);
        assert_eq!(icbrt(10_000_000_000), 2154);
    }

    #[test]
    fn constant_and_short_series_fail() {
        assert!(ess_batch_means(&[1.0; 100]).is_err());
        assert!(ess_batch_means(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn alternating_series_is_anticorrelated() {
        let s: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = ess_batch_means(&s).unwrap();
        assert!(r.ess > 1000.0);
    }
}
