use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

use super::ess::ess_batch_means;

pub fn acceptance_rate(flags: &[bool]) -> Result<f64> {
    if flags.is_empty() {
        return Err(Error::Degenerate("empty trace".into()));
    }
    Ok(flags.iter().filter(|a| **a).count() as f64 / flags.len() as f64)
}

/// Per-coordinate means and the (biased) covariance matrix.
pub fn moment_estimates(samples: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let d = samples.first().map(|r| r.len()).ok_or_else(|| Error::Degenerate("no samples".into()))?;
    let n = samples.len() as f64;
    let mut mean = vec![0.0; d];
    for r in samples {
        for i in 0..d {
            mean[i] += r[i] / n;
        }
    }
    let mut cov = vec![vec![0.0; d]; d];
    for r in samples {
        for i in 0..d {
            for j in 0..d {
                cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]) / n;
            }
        }
    }
    Ok((mean, cov))
}

/// Mean with a batch-means Monte Carlo standard error.
pub fn mean_and_mcse(series: &[f64]) -> Result<(f64, f64)> {
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let ess = ess_batch_means(series)?.ess;
    Ok((mean, (var / ess).sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub stat: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit. Cells with expected count below 5 are pooled into
/// one cell, which is folded into the smallest remaining cell if it is still
/// too small.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(Error::Config("observed and expected lengths differ".into()));
    }
    let n: u64 = observed.iter().sum();
    let total: f64 = probs.iter().sum();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut po, mut pe) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p / total * n as f64;
        if e < 5.0 {
            po += o as f64;
            pe += e;
        } else {
            cells.push((o as f64, e));
        }
    }
    if pe > 0.0 || po > 0.0 {
        if pe >= 5.0 || cells.is_empty() {
            cells.push((po, pe));
        } else {
            let k = (0..cells.len()).min_by(|&a, &b| cells[a].1.total_cmp(&cells[b].1)).unwrap();
            cells[k].0 += po;
            cells[k].1 += pe;
        }
    }
    if cells.len() < 2 {
        return Err(Error::Degenerate("fewer than two cells after pooling".into()));
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Degenerate(e.to_string()))?;
    Ok(ChiSquare { stat, dof, p_value: dist.sf(stat) })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub d: f64,
    pub p_value: f64,
}

/// Kolmogorov survival function Q(λ) = 2 Σ (-1)^(k-1) exp(-2 k² λ²).
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut s = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let t = sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        s += t;
        if t.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::Degenerate("no samples".into()));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d = 0.0f64;
    for (i, &a) in s.iter().enumerate() {
        let f = cdf(a);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let rn = n.sqrt();
    Ok(KsResult { d, p_value: kolmogorov_q((rn + 0.12 + 0.11 / rn) * d) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acceptance_of_empty_trace_errors() {
        assert!(acceptance_rate(&[]).is_err());
        assert_eq!(acceptance_rate(&[true, false, true, true]).unwrap(), 0.75);
    }

    #[test]
    fn perfect_fit_has_unit_p_value() {
        let r = chi_square_gof(&[25, 25, 25, 25], &[0.25; 4]).unwrap();
        assert_eq!(r.stat, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_cells_are_pooled() {
        let r = chi_square_gof(&[50, 47, 1, 2], &[0.5, 0.47, 0.01, 0.02]).unwrap();
        assert_eq!(r.dof, 1);
    }

    #[test]
    fn kolmogorov_tail_values() {
        assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-3);
        assert_eq!(kolmogorov_q(0.0), 1.0);
    }

    #[test]
    fn ks_on_uniform_grid_passes() {
        let s: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let r = ks_test(&s, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(r.d < 1e-3 + 1e-12 && r.p_value > 0.99);
    }
}
