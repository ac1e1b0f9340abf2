use crate::density::LogDensity;
use crate::error::{Error, Result};

use super::Dataset;

/// Bayesian logistic regression posterior with an isotropic zero-mean
/// normal prior on (weights, bias). θ = [w_1..w_p, b].
#[derive(Clone, Debug)]
pub struct LogisticPosterior {
    pub data: Dataset,
    pub prior_var: f64,
}

/// Prior variance on every coefficient.
pub const PRIOR_VAR: f64 = 0.1;

fn log_sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        -(-t).exp().ln_1p()
    } else {
        t - t.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl LogisticPosterior {
    pub fn new(data: Dataset) -> Self {
        Self { data, prior_var: PRIOR_VAR }
    }

    pub fn eval(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        let p = self.data.cols();
        if theta.len() != p + 1 {
            return Err(Error::Config(format!("theta has {} entries, expected {}", theta.len(), p + 1)));
        }
        let mut lp = 0.0;
        let mut g = vec![0.0; p + 1];
        for (row, &y) in self.data.x.iter().zip(&self.data.y) {
            let t: f64 = row.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>() + theta[p];
            // log p(y|t) = y log σ(t) + (1 - y) log σ(-t)
            lp += if y == 1.0 { log_sigmoid(t) } else { log_sigmoid(-t) };
            let r = y - sigmoid(t);
            for (gi, a) in g.iter_mut().zip(row) {
                *gi += r * a;
            }
            g[p] += r;
        }
        let d = (p + 1) as f64;
        lp += -0.5 * theta.iter().map(|a| a * a).sum::<f64>() / self.prior_var
            - 0.5 * d * (2.0 * std::f64::consts::PI * self.prior_var).ln();
        for (gi, a) in g.iter_mut().zip(theta) {
            *gi -= a / self.prior_var;
        }
        Ok((lp, g))
    }
}

impl LogDensity for LogisticPosterior {
    fn dim(&self) -> usize {
        self.data.cols() + 1
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        self.eval(x).map(|r| r.0).unwrap_or(f64::NAN)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.eval(x).ok().map(|r| r.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::gradient_error;
    use crate::targets::synthetic_dataset;
    use approx::assert_abs_diff_eq;

    fn prior_only(theta: &[f64]) -> f64 {
        let d = theta.len() as f64;
        -0.5 * theta.iter().map(|a| a * a).sum::<f64>() / PRIOR_VAR - 0.5 * d * (2.0 * std::f64::consts::PI * PRIOR_VAR).ln()
    }

    #[test]
    fn empty_data_gives_the_prior() {
        let post = LogisticPosterior::new(Dataset { x: Vec::new(), y: Vec::new(), names: vec!["a".into(), "b".into()] });
        let th = [0.3, -0.1, 0.2];
        assert_abs_diff_eq!(post.log_density(&th), prior_only(&th), epsilon = 1e-12);
    }

    #[test]
    fn single_point_at_zero_is_log_half() {
        let post = LogisticPosterior::new(Dataset { x: vec![vec![1.5]], y: vec![1.0], names: vec!["a".into()] });
        let th = [0.0, 0.0];
        assert_abs_diff_eq!(post.log_density(&th) - prior_only(&th), 0.5f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn gradient_matches_differences() {
        let post = LogisticPosterior::new(synthetic_dataset(10, 3, 11));
        for th in [[0.1, -0.2, 0.3, 0.05], [1.0, 0.5, -0.7, -0.3]] {
            assert!(gradient_error(&post, &th, 1e-6).unwrap() < 1e-5);
        }
    }

    #[test]
    fn wrong_dimension_errors() {
        let post = LogisticPosterior::new(synthetic_dataset(5, 2, 1));
        assert!(post.eval(&[0.0]).is_err());
    }

    #[test]
    fn log_sigmoid_is_stable() {
        assert!(log_sigmoid(-800.0).is_finite());
        assert_abs_diff_eq!(log_sigmoid(800.0), 0.0);
    }
}
