use crate::density::LogDensity;
use crate::error::{Error, Result};

/// Probability table on a product of index sets; x holds the indices as
/// floats. Anything off the grid has density zero.
#[derive(Clone, Debug)]
pub struct TableTarget {
    pub shape: Vec<usize>,
    pub pmf: Vec<f64>,
}

impl TableTarget {
    pub fn new(shape: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if shape.iter().product::<usize>() != weights.len() || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::Config("table weights do not match the shape".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Config("table has no mass".into()));
        }
        Ok(Self { shape, pmf: weights.iter().map(|w| w / total).collect() })
    }

    pub fn new_1d(weights: Vec<f64>) -> Result<Self> {
        Self::new(vec![weights.len()], weights)
    }

    pub fn len(&self) -> usize {
        self.pmf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pmf.is_empty()
    }

    /// Flat row-major index of a point, if it lies on the grid.
    pub fn index(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.shape.len() {
            return None;
        }
        let mut idx = 0;
        for (a, n) in x.iter().zip(&self.shape) {
            if a.fract() != 0.0 || *a < 0.0 || *a >= *n as f64 {
                return None;
            }
            idx = idx * n + *a as usize;
        }
        Some(idx)
    }

    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.shape.len()];
        for (o, n) in out.iter_mut().zip(&self.shape).rev() {
            *o = (idx % n) as f64;
            idx /= n;
        }
        out
    }

    pub fn prob(&self, x: &[f64]) -> f64 {
        self.index(x).map(|i| self.pmf[i]).unwrap_or(0.0)
    }
}

impl LogDensity for TableTarget {
    fn dim(&self) -> usize {
        self.shape.len()
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        self.prob(x).ln()
    }
}

/// A smooth 1-D log-density restricted to the grid points lo + i·h. Index i
/// is the state; the gradient reported at i is the smooth gradient at the
/// grid position, scaled to index units.
pub struct GridTarget {
    pub lo: f64,
    pub h: f64,
    pub n: usize,
    logp: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    grad: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl GridTarget {
    pub fn new(
        lo: f64,
        h: f64,
        n: usize,
        logp: impl Fn(f64) -> f64 + Send + Sync + 'static,
        grad: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { lo, h, n, logp: Box::new(logp), grad: Box::new(grad) }
    }

    pub fn position(&self, i: f64) -> f64 {
        self.lo + i * self.h
    }

    /// Normalized probabilities of the grid points.
    pub fn pmf(&self) -> Vec<f64> {
        let w: Vec<f64> = (0..self.n).map(|i| (self.logp)(self.position(i as f64)).exp()).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|a| a / s).collect()
    }

    fn on_grid(&self, i: f64) -> bool {
        i.fract() == 0.0 && i >= 0.0 && i < self.n as f64
    }
}

impl LogDensity for GridTarget {
    fn dim(&self) -> usize {
        1
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        if self.on_grid(x[0]) {
            (self.logp)(self.position(x[0]))
        } else {
            f64::NEG_INFINITY
        }
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![(self.grad)(self.position(x[0])) * self.h])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_indexing_roundtrip() {
        let t = TableTarget::new(vec![2, 3], (1..=6).map(|a| a as f64).collect()).unwrap();
        assert!((t.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        for i in 0..6 {
            assert_eq!(t.index(&t.point(i)), Some(i));
        }
        assert_eq!(t.index(&[0.5, 0.0]), None);
        assert_eq!(t.log_density(&[2.0, 0.0]), f64::NEG_INFINITY);
    }
}
