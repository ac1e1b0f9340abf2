//! Exact integer analogs of the continuous maps, used to build finite
//! state spaces on which transition matrices can be enumerated.

use crate::error::{Error, Result};
use crate::point::JointPoint;

use super::FlowMap;

fn as_index(a: f64, n: usize, what: &str) -> Result<usize> {
    if a.fract() != 0.0 || a < 0.0 || a >= n as f64 {
        return Err(Error::Layout(format!("{what} value {a} is not an index below {n}")));
    }
    Ok(a as usize)
}

/// Leapfrog on the ring Z_n with integer momentum and integer kicks g(x):
/// v ← v + g(x); x ← x + v mod n; v ← v + g(x). F∘L^k is an exact involution.
#[derive(Clone, Debug)]
pub struct LatticeLeapfrog {
    pub n: usize,
    pub kick: Vec<i64>,
    pub k: usize,
}

impl LatticeLeapfrog {
    pub fn new(n: usize, kick: Vec<i64>, k: usize) -> Result<Self> {
        if kick.len() != n || k == 0 {
            return Err(Error::Config("lattice leapfrog needs one kick per site and k >= 1".into()));
        }
        Ok(Self { n, kick, k })
    }

    fn g(&self, x: f64) -> Result<f64> {
        Ok(self.kick[as_index(x, self.n, "lattice x")?] as f64)
    }
}

impl FlowMap for LatticeLeapfrog {
    fn name(&self) -> String {
        format!("lattice-leapfrog(n={}, k={})", self.n, self.k)
    }
    fn forward(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let mut p = z.clone();
        let n = self.n as f64;
        for _ in 0..self.k {
            let vh = p.v[0] + self.g(p.x[0])?;
            p.x[0] = (p.x[0] + vh).rem_euclid(n);
            p.v[0] = vh + self.g(p.x[0])?;
        }
        Ok((p, 0.0))
    }
    fn inverse(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let mut p = z.clone();
        let n = self.n as f64;
        for _ in 0..self.k {
            let vh = p.v[0] - self.g(p.x[0])?;
            p.x[0] = (p.x[0] - vh).rem_euclid(n);
            p.v[0] = vh - self.g(p.x[0])?;
        }
        Ok((p, 0.0))
    }
}

/// Additive coupling on Z_nx × Z_nv: x ← x + a[v] mod nx; v ← v + b[x] mod nv.
#[derive(Clone, Debug)]
pub struct LatticeCoupling {
    pub nx: usize,
    pub nv: usize,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

impl FlowMap for LatticeCoupling {
    fn name(&self) -> String {
        "lattice-coupling".into()
    }
    fn forward(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let mut p = z.clone();
        let v = as_index(p.v[0], self.nv, "lattice v")?;
        p.x[0] = (p.x[0] + self.a[v] as f64).rem_euclid(self.nx as f64);
        let x = as_index(p.x[0], self.nx, "lattice x")?;
        p.v[0] = (p.v[0] + self.b[x] as f64).rem_euclid(self.nv as f64);
        Ok((p, 0.0))
    }
    fn inverse(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let mut p = z.clone();
        let x = as_index(p.x[0], self.nx, "lattice x")?;
        p.v[0] = (p.v[0] - self.b[x] as f64).rem_euclid(self.nv as f64);
        let v = as_index(p.v[0], self.nv, "lattice v")?;
        p.x[0] = (p.x[0] - self.a[v] as f64).rem_euclid(self.nx as f64);
        Ok((p, 0.0))
    }
}

fn inverse_perm(perm: &[usize]) -> Result<Vec<usize>> {
    let mut inv = vec![usize::MAX; perm.len()];
    for (i, &j) in perm.iter().enumerate() {
        if j >= perm.len() || inv[j] != usize::MAX {
            return Err(Error::Config("table is not a permutation".into()));
        }
        inv[j] = i;
    }
    Ok(inv)
}

/// Permutation of the pairs (x, v) with x < nx and v one of `v_values`.
/// Cells of x carry log-volumes, so the map reports the non-unit Jacobian
/// logvol(x') - logvol(x).
#[derive(Clone, Debug)]
pub struct TablePermutation {
    pub nx: usize,
    pub v_values: Vec<f64>,
    perm: Vec<usize>,
    inv: Vec<usize>,
    pub logvol: Vec<f64>,
}

impl TablePermutation {
    pub fn new(nx: usize, v_values: Vec<f64>, perm: Vec<usize>, logvol: Vec<f64>) -> Result<Self> {
        if perm.len() != nx * v_values.len() || logvol.len() != nx {
            return Err(Error::Config("table permutation size mismatch".into()));
        }
        let inv = inverse_perm(&perm)?;
        Ok(Self { nx, v_values, perm, inv, logvol })
    }

    fn index(&self, z: &JointPoint) -> Result<usize> {
        let x = as_index(z.x[0], self.nx, "table x")?;
        let v = self
            .v_values
            .iter()
            .position(|a| *a == z.v[0])
            .ok_or_else(|| Error::Layout(format!("table v value {} unknown", z.v[0])))?;
        Ok(x * self.v_values.len() + v)
    }

    fn go(&self, z: &JointPoint, table: &[usize]) -> Result<(JointPoint, f64)> {
        let j = table[self.index(z)?];
        let nv = self.v_values.len();
        let mut p = z.clone();
        p.x[0] = (j / nv) as f64;
        p.v[0] = self.v_values[j % nv];
        let ld = self.logvol[j / nv] - self.logvol[z.x[0] as usize];
        Ok((p, ld))
    }
}

impl FlowMap for TablePermutation {
    fn name(&self) -> String {
        "table-permutation".into()
    }
    fn forward(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        self.go(z, &self.perm)
    }
    fn inverse(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        self.go(z, &self.inv)
    }
}

/// Permutation of x-cells between two volume assignments: x ↦ perm[x] with
/// log|J| = dst[perm[x]] - src[x].
#[derive(Clone, Debug)]
pub struct XPermutation {
    perm: Vec<usize>,
    inv: Vec<usize>,
    pub src: Vec<f64>,
    pub dst: Vec<f64>,
}

impl XPermutation {
    pub fn new(perm: Vec<usize>, src: Vec<f64>, dst: Vec<f64>) -> Result<Self> {
        if src.len() != perm.len() || dst.len() != perm.len() {
            return Err(Error::Config("x permutation size mismatch".into()));
        }
        let inv = inverse_perm(&perm)?;
        Ok(Self { perm, inv, src, dst })
    }
}

impl FlowMap for XPermutation {
    fn name(&self) -> String {
        "x-permutation".into()
    }
    fn forward(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let x = as_index(z.x[0], self.perm.len(), "x")?;
        let mut p = z.clone();
        p.x[0] = self.perm[x] as f64;
        Ok((p, self.dst[self.perm[x]] - self.src[x]))
    }
    fn inverse(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let y = as_index(z.x[0], self.perm.len(), "x")?;
        let mut p = z.clone();
        p.x[0] = self.inv[y] as f64;
        Ok((p, self.src[self.inv[y]] - self.dst[y]))
    }
}
