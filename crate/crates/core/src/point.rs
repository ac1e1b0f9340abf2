use crate::error::{Error, Result};

/// A point of the joint space: target block `x`, auxiliary block `v` and discrete tags.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct JointPoint {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub tags: Vec<i64>,
}

impl JointPoint {
    pub fn new(x: Vec<f64>) -> Self {
        Self { x, v: Vec::new(), tags: Vec::new() }
    }

    pub fn with_v(mut self, v: Vec<f64>) -> Self {
        self.v = v;
        self
    }

    pub fn with_tags(mut self, tags: Vec<i64>) -> Self {
        self.tags = tags;
        self
    }

    pub fn tag(&self, i: usize) -> i64 {
        self.tags[i]
    }

    /// Largest componentwise difference of the continuous blocks, `None` when
    /// shapes or tags differ.
    pub fn distance(&self, other: &JointPoint) -> Option<f64> {
        if self.x.len() != other.x.len() || self.v.len() != other.v.len() || self.tags != other.tags {
            return None;
        }
        let d = self
            .x
            .iter()
            .zip(&other.x)
            .chain(self.v.iter().zip(&other.v))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Some(d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TagKind {
    /// Takes values in {-1, +1}.
    Direction,
    Index,
}

/// Declared shape of the points a kernel operates on. `None` dimensions are
/// variable (transdimensional kernels).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub x_dim: Option<usize>,
    pub v_dim: Option<usize>,
    pub tags: Vec<(&'static str, TagKind)>,
}

impl Layout {
    pub fn new(x_dim: usize, v_dim: usize) -> Self {
        Self { x_dim: Some(x_dim), v_dim: Some(v_dim), tags: Vec::new() }
    }

    pub fn variable() -> Self {
        Self { x_dim: None, v_dim: None, tags: Vec::new() }
    }

    pub fn tag(mut self, name: &'static str, kind: TagKind) -> Self {
        self.tags.push((name, kind));
        self
    }

    pub fn tag_index(&self, name: &str) -> Option<usize> {
        self.tags.iter().position(|(n, _)| *n == name)
    }

    pub fn check(&self, z: &JointPoint) -> Result<()> {
        if let Some(d) = self.x_dim {
            if z.x.len() != d {
                return Err(Error::Layout(format!("x block has {} entries, expected {d}", z.x.len())));
            }
        }
        if let Some(d) = self.v_dim {
            if z.v.len() != d {
                return Err(Error::Layout(format!("v block has {} entries, expected {d}", z.v.len())));
            }
        }
        if z.tags.len() != self.tags.len() {
            return Err(Error::Layout(format!(
                "{} tags, expected {}",
                z.tags.len(),
                self.tags.len()
            )));
        }
        for ((name, kind), t) in self.tags.iter().zip(&z.tags) {
            if *kind == TagKind::Direction && *t != 1 && *t != -1 {
                return Err(Error::Layout(format!("direction tag `{name}` = {t}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_requires_equal_tags() {
        let a = JointPoint::new(vec![0.0, 1.0]).with_tags(vec![1]);
        let b = JointPoint::new(vec![0.5, 1.0]).with_tags(vec![1]);
        assert_eq!(a.distance(&b), Some(0.5));
        assert_eq!(a.distance(&b.clone().with_tags(vec![-1])), None);
    }

    #[test]
    fn layout_rejects_bad_direction() {
        let l = Layout::new(1, 0).tag("d", TagKind::Direction);
        assert!(l.check(&JointPoint::new(vec![0.0]).with_tags(vec![1])).is_ok());
        assert!(l.check(&JointPoint::new(vec![0.0]).with_tags(vec![0])).is_err());
        assert!(l.check(&JointPoint::new(vec![0.0, 1.0]).with_tags(vec![1])).is_err());
    }
}
