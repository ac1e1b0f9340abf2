use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::kernel::Transition;
use crate::point::JointPoint;

/// Largest joint state space the oracle will enumerate.
pub const MAX_STATES: usize = 64;

/// Which coordinates identify a state. Slots left out must be resampled by
/// every kernel before they are read.
#[derive(Clone, Debug, Default)]
pub struct KeySpec {
    pub x: bool,
    pub v: Vec<usize>,
    pub tags: Vec<usize>,
}

impl KeySpec {
    pub fn x_only() -> Self {
        Self { x: true, ..Default::default() }
    }

    pub fn with_tags(mut self, tags: Vec<usize>) -> Self {
        self.tags = tags;
        self
    }

    pub fn with_v(mut self, v: Vec<usize>) -> Self {
        self.v = v;
        self
    }

    pub fn key(&self, z: &JointPoint) -> Vec<i64> {
        let q = |a: f64| (a * 1e9).round() as i64;
        let mut k = Vec::new();
        if self.x {
            k.push(z.x.len() as i64);
            k.extend(z.x.iter().map(|a| q(*a)));
        }
        k.extend(self.v.iter().map(|&i| z.v.get(i).map(|a| q(*a)).unwrap_or(i64::MIN)));
        k.extend(self.tags.iter().map(|&i| z.tags[i]));
        k
    }
}

/// An enumerated finite joint state space.
#[derive(Clone, Debug)]
pub struct StateSpace {
    pub states: Vec<JointPoint>,
    pub keys: KeySpec,
    index: HashMap<Vec<i64>, usize>,
}

impl StateSpace {
    pub fn new(states: Vec<JointPoint>, keys: KeySpec) -> Result<Self> {
        if states.len() > MAX_STATES {
            return Err(Error::StateSpaceTooLarge(states.len(), MAX_STATES));
        }
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if index.insert(keys.key(s), i).is_some() {
                return Err(Error::Config(format!("duplicate state {s:?}")));
            }
        }
        Ok(Self { states, keys, index })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, z: &JointPoint) -> Result<usize> {
        self.index.get(&self.keys.key(z)).copied().ok_or_else(|| Error::UnknownState(format!("{z:?}")))
    }
}

/// Dense row-stochastic matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    pub n: usize,
    pub m: usize,
    pub data: Vec<f64>,
}

impl TransitionMatrix {
    pub fn zeros(n: usize, m: usize) -> Self {
        Self { n, m, data: vec![0.0; n * m] }
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(n, n);
        for i in 0..n {
            t.data[i * n + i] = 1.0;
        }
        t
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let m = rows.first().map(|r| r.len()).unwrap_or(0);
        Self { n, m, data: rows.iter().flatten().copied().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn mul(&self, o: &TransitionMatrix) -> TransitionMatrix {
        let mut out = Self::zeros(self.n, o.m);
        for i in 0..self.n {
            for k in 0..self.m {
                let a = self.get(i, k);
                if a != 0.0 {
                    for j in 0..o.m {
                        out.data[i * o.m + j] += a * o.get(k, j);
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, o: &TransitionMatrix) -> f64 {
        if self.n != o.n || self.m != o.m {
            return f64::INFINITY;
        }
        self.data.iter().zip(&o.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// max_i |Σ_j T(i, j) - 1|.
    pub fn row_sum_error(&self) -> f64 {
        (0..self.n).map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Exact matrix of `t` by summing its successor distribution from each state.
pub fn transition_matrix(t: &dyn Transition, space: &StateSpace) -> Result<TransitionMatrix> {
    let n = space.len();
    let mut m = TransitionMatrix::zeros(n, n);
    for (i, s) in space.states.iter().enumerate() {
        for (p, w) in t.successors(s)? {
            if w == 0.0 {
                continue;
            }
            let j = space.index_of(&p)?;
            m.data[i * n + j] += w;
        }
    }
    Ok(m)
}

/// Matrix of a composition as the ordered product of its parts' matrices
/// (recursively); leaves fall back to `transition_matrix`.
pub fn product_matrix(t: &dyn Transition, space: &StateSpace) -> Result<TransitionMatrix> {
    let parts = t.components();
    if parts.is_empty() {
        return transition_matrix(t, space);
    }
    let mut acc = TransitionMatrix::identity(space.len());
    for p in parts {
        acc = acc.mul(&product_matrix(p.as_ref(), space)?);
    }
    Ok(acc)
}

/// Sums each row over groups of destination states.
pub fn lump(t: &TransitionMatrix, group: &[usize], groups: usize) -> TransitionMatrix {
    let mut out = TransitionMatrix::zeros(t.n, groups);
    for i in 0..t.n {
        for j in 0..t.m {
            out.data[i * groups + group[j]] += t.get(i, j);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Check {
    pub value: f64,
    pub pass: bool,
}

/// ‖pT - p‖∞ ≤ tol.
pub fn check_stationary(t: &TransitionMatrix, p: &[f64], tol: f64) -> Check {
    let mut worst = 0.0f64;
    for j in 0..t.m {
        let s: f64 = (0..t.n).map(|i| p[i] * t.get(i, j)).sum();
        worst = worst.max((s - p[j]).abs());
    }
    Check { value: worst, pass: worst <= tol }
}

/// max |p_i T(i, j) - p_j T(j, i)| ≤ tol.
pub fn check_detailed_balance(t: &TransitionMatrix, p: &[f64], tol: f64) -> Check {
    let mut worst = 0.0f64;
    for i in 0..t.n {
        for j in (i + 1)..t.n {
            worst = worst.max((p[i] * t.get(i, j) - p[j] * t.get(j, i)).abs());
        }
    }
    Check { value: worst, pass: worst <= tol }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_symmetric_checks() {
        let id = TransitionMatrix::identity(3);
        let p = [0.2, 0.3, 0.5];
        assert!(check_stationary(&id, &p, 1e-15).pass);
        let sym = TransitionMatrix::from_rows(&[vec![0.4, 0.6], vec![0.6, 0.4]]);
        assert!(check_detailed_balance(&sym, &[0.5, 0.5], 1e-15).pass);
        assert!(check_stationary(&sym, &[0.5, 0.5], 1e-15).pass);
    }

    #[test]
    fn cyclic_chain_is_stationary_but_not_reversible() {
        let c = TransitionMatrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]]);
        let p = [1.0 / 3.0; 3];
        assert!(check_stationary(&c, &p, 1e-15).pass);
        let db = check_detailed_balance(&c, &p, 1e-12);
        assert!(!db.pass && db.value > 0.3);
    }

    #[test]
    fn oversized_space_is_refused() {
        let states = (0..65).map(|i| JointPoint::new(vec![i as f64])).collect();
        assert!(matches!(StateSpace::new(states, KeySpec::x_only()), Err(Error::StateSpaceTooLarge(65, 64))));
    }
}
