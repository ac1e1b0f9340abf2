//! Numerical self-checks for involutions and Jacobians.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::maps::Involution;
use crate::point::JointPoint;

#[derive(Clone, Debug, PartialEq)]
pub struct InvolutionReport {
    /// max ‖f(f(z)) - z‖∞ over the points (infinite if tags or shapes differ).
    pub max_displacement: f64,
    /// max |logdet(z) + logdet(f(z))|.
    pub max_logdet_asymmetry: f64,
    pub pass: bool,
}

pub fn verify_involution(f: &dyn Involution, points: &[JointPoint], tol: f64) -> Result<InvolutionReport> {
    let mut disp = 0.0f64;
    let mut asym = 0.0f64;
    for z in points {
        let (a, l1) = f.apply(z)?;
        let (b, l2) = f.apply(&a)?;
        disp = disp.max(z.distance(&b).unwrap_or(f64::INFINITY));
        asym = asym.max((l1 + l2).abs());
    }
    Ok(InvolutionReport {
        max_displacement: disp,
        max_logdet_asymmetry: asym,
        pass: disp <= tol && asym <= tol,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacobianReport {
    pub reported: f64,
    /// log|det| of the central-difference Jacobian.
    pub numerical: f64,
    /// Ratio of extreme singular values of the numerical Jacobian.
    pub condition: f64,
    pub pass: bool,
}

/// Step of the central differences.
pub const FD_STEP: f64 = 1e-5;

/// Compares the log|det J| reported by `map` at `z` with the determinant of
/// the central-difference Jacobian over the continuous coordinates [x, v].
pub fn verify_jacobian(
    map: impl Fn(&JointPoint) -> Result<(JointPoint, f64)>,
    z: &JointPoint,
    tol: f64,
) -> Result<JacobianReport> {
    let (_, reported) = map(z)?;
    let (nx, nv) = (z.x.len(), z.v.len());
    let n = nx + nv;
    let flat = |p: &JointPoint| -> Vec<f64> { p.x.iter().chain(&p.v).copied().collect() };
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut up = z.clone();
        let mut dn = z.clone();
        if j < nx {
            up.x[j] += FD_STEP;
            dn.x[j] -= FD_STEP;
        } else {
            up.v[j - nx] += FD_STEP;
            dn.v[j - nx] -= FD_STEP;
        }
        let (fu, fd) = (flat(&map(&up)?.0), flat(&map(&dn)?.0));
        for i in 0..n {
            jac[(i, j)] = (fu[i] - fd[i]) / (2.0 * FD_STEP);
        }
    }
    let sv = jac.clone().singular_values();
    let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(a, b), s| (a.max(*s), b.min(*s)));
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let numerical = jac.determinant().abs().ln();
    let pass = numerical.is_finite() && (numerical - reported).abs() <= tol;
    Ok(JacobianReport { reported, numerical, condition, pass })
}
