use crate::error::{Error, Result};
use crate::point::JointPoint;

use super::Involution;

/// A coordinate of the continuous blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    X(usize),
    V(usize),
}

fn get(z: &JointPoint, s: Slot) -> Result<f64> {
    match s {
        Slot::X(i) => z.x.get(i),
        Slot::V(i) => z.v.get(i),
    }
    .copied()
    .ok_or_else(|| Error::Layout(format!("slot {s:?} out of range")))
}

fn set(z: &mut JointPoint, s: Slot, a: f64) {
    match s {
        Slot::X(i) => z.x[i] = a,
        Slot::V(i) => z.v[i] = a,
    }
}

/// Disjoint transpositions of coordinates; the plain `x <-> v` swap is the
/// most common instance.
#[derive(Clone, Debug)]
pub struct Swap {
    pairs: Vec<(Slot, Slot)>,
}

impl Swap {
    pub fn new(pairs: Vec<(Slot, Slot)>) -> Result<Self> {
        let mut seen = Vec::new();
        for (a, b) in &pairs {
            for s in [a, b] {
                if seen.contains(s) {
                    return Err(Error::Config(format!("slot {s:?} appears twice in a swap")));
                }
                seen.push(*s);
            }
        }
        Ok(Self { pairs })
    }

    /// x[i] <-> v[offset + i] for i < dim.
    pub fn x_v(dim: usize, offset: usize) -> Self {
        Self { pairs: (0..dim).map(|i| (Slot::X(i), Slot::V(offset + i))).collect() }
    }

    /// v[i] <-> v[offset + i] for i < dim.
    pub fn v_v(dim: usize, offset: usize) -> Self {
        Self { pairs: (0..dim).map(|i| (Slot::V(i), Slot::V(offset + i))).collect() }
    }
}

impl Involution for Swap {
    fn name(&self) -> String {
        "swap".into()
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let mut out = z.clone();
        for &(a, b) in &self.pairs {
            let (va, vb) = (get(z, a)?, get(z, b)?);
            set(&mut out, a, vb);
            set(&mut out, b, va);
        }
        Ok((out, 0.0))
    }
}

/// Momentum flip: negates v[start..start+len].
#[derive(Clone, Debug)]
pub struct NegateV {
    pub start: usize,
    pub len: usize,
}

impl Involution for NegateV {
    fn name(&self) -> String {
        "flip".into()
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        if z.v.len() < self.start + self.len {
            return Err(Error::Layout("momentum block too short".into()));
        }
        let mut out = z.clone();
        for a in &mut out.v[self.start..self.start + self.len] {
            *a = -*a;
        }
        Ok((out, 0.0))
    }
}

/// Negates a direction tag.
#[derive(Clone, Debug)]
pub struct FlipTag(pub usize);

impl Involution for FlipTag {
    fn name(&self) -> String {
        "direction flip".into()
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let mut out = z.clone();
        let t = out.tags.get_mut(self.0).ok_or_else(|| Error::Layout("missing direction tag".into()))?;
        *t = -*t;
        Ok((out, 0.0))
    }
}

/// Negates tag `target` when tag `cond` equals `value`.
#[derive(Clone, Debug)]
pub struct NegateTagIf {
    pub target: usize,
    pub cond: usize,
    pub value: i64,
}

impl Involution for NegateTagIf {
    fn name(&self) -> String {
        "conditional flip".into()
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let mut out = z.clone();
        if out.tags.len() <= self.target.max(self.cond) {
            return Err(Error::Layout("missing tag".into()));
        }
        if out.tags[self.cond] == self.value {
            out.tags[self.target] = -out.tags[self.target];
        }
        Ok((out, 0.0))
    }
}

/// Applies involutions in sequence. Only an involution when the factors
/// commute (e.g. they act on disjoint coordinates).
#[derive(Clone)]
pub struct Product(pub Vec<std::sync::Arc<dyn Involution>>);

impl Involution for Product {
    fn name(&self) -> String {
        self.0.iter().map(|f| f.name()).collect::<Vec<_>>().join(" * ")
    }
    fn apply(&self, z: &JointPoint) -> Result<(JointPoint, f64)> {
        let mut p = z.clone();
        let mut ld = 0.0;
        for f in &self.0 {
            let (q, l) = f.apply(&p)?;
            p = q;
            ld += l;
        }
        Ok((p, ld))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_twice_is_identity() {
        let z = JointPoint::new(vec![1.0, 2.0]).with_v(vec![3.0, 4.0]);
        let s = Swap::x_v(2, 0);
        let (a, ld) = s.apply(&z).unwrap();
        assert_eq!(a.x, vec![3.0, 4.0]);
        assert_eq!(ld, 0.0);
        assert_eq!(s.apply(&a).unwrap().0, z);
    }

    #[test]
    fn flip_fixes_zero_momentum() {
        let z = JointPoint::new(vec![1.0]).with_v(vec![0.0]);
        let f = NegateV { start: 0, len: 1 };
        assert_eq!(f.apply(&z).unwrap().0.v, vec![0.0]);
        let w = JointPoint::new(vec![1.0]).with_v(vec![2.5]);
        assert_eq!(f.apply(&f.apply(&w).unwrap().0).unwrap().0, w);
    }

    #[test]
    fn repeated_slot_is_rejected() {
        assert!(Swap::new(vec![(Slot::X(0), Slot::V(0)), (Slot::V(0), Slot::V(1))]).is_err());
    }
}
