use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::kernel::{Acceptance, StepLog, Transition};
use crate::maps::{cdf_map, Cdf1d, CDF_CLAMP};
use crate::point::JointPoint;

/// x' = F⁻¹((F(x) + C) mod 1): rejection-free and deterministic.
#[derive(Clone)]
pub struct CdfKernel {
    pub cdf: Arc<dyn Cdf1d>,
    pub shift: f64,
    pub clamp: f64,
}

impl CdfKernel {
    pub fn new(cdf: Arc<dyn Cdf1d>, shift: f64) -> Self {
        Self { cdf, shift, clamp: CDF_CLAMP }
    }

    fn image(&self, z: &JointPoint) -> Result<JointPoint> {
        if z.x.len() != 1 {
            return Err(Error::Layout("CDF kernel is one-dimensional".into()));
        }
        let mut p = z.clone();
        p.x[0] = cdf_map(self.cdf.as_ref(), z.x[0], self.shift, self.clamp);
        Ok(p)
    }
}

/// Builds the deterministic kernel, or a configuration error when the target
/// has no CDF.
pub fn make_cdf_deterministic(cdf: Option<Arc<dyn Cdf1d>>, shift: f64) -> Result<CdfKernel> {
    let cdf = cdf.ok_or_else(|| Error::Config("target has no analytic CDF".into()))?;
    Ok(CdfKernel::new(cdf, shift))
}

impl Transition for CdfKernel {
    fn name(&self) -> String {
        "cdf".into()
    }
    fn step(&self, z: &mut JointPoint, _rng: &mut dyn Rng, log: &mut StepLog) -> Result<()> {
        *z = self.image(z)?;
        log.entries.push(Acceptance { prob: 1.0, accepted: true });
        Ok(())
    }
    fn successors(&self, z: &JointPoint) -> Result<Vec<(JointPoint, f64)>> {
        Ok(vec![(self.image(z)?, 1.0)])
    }
}
