//! SO(3): 3×3 rotation matrices.
//!
//! Exponential by the Rodrigues formula; logarithm through quaternion
//! extraction (Shepperd's method), which stays well conditioned all the way
//! to the branch cut at angle π. Logs at angle ≥ π − 1e-6 are a hard error:
//! the bound derivations downstream assume small errors, so near-cut values
//! indicate misuse.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

use super::{GroupId, GroupOps, LOG_ANGLE_MARGIN};

pub(super) struct So3;

impl GroupOps for So3 {
    fn id(&self) -> GroupId {
        GroupId::So3
    }

    fn name(&self) -> String {
        "so3".into()
    }

    fn algebra_dim(&self) -> usize {
        3
    }

    fn matrix_size(&self) -> usize {
        3
    }

    fn generator(&self, i: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(3, 3);
        match i {
            0 => {
                m[(2, 1)] = 1.0;
                m[(1, 2)] = -1.0;
            }
            1 => {
                m[(0, 2)] = 1.0;
                m[(2, 0)] = -1.0;
            }
            2 => {
                m[(1, 0)] = 1.0;
                m[(0, 1)] = -1.0;
            }
            _ => panic!("so(3) has three generators"),
        }
        m
    }

    fn exp(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let theta2 = v.norm_squared();
        let theta = theta2.sqrt();
        let (a, b) = rodrigues_coefficients(theta);
        let k = skew(v);
        DMatrix::identity(3, 3) + &k * a + &k * &k * b
    }

    fn log(&self, m: &DMatrix<f64>) -> Result<DVector<f64>> {
        let (w, xyz) = quaternion_from_rotation(m);
        let sin_half = xyz.norm();
        let angle = 2.0 * sin_half.atan2(w);
        let limit = PI - LOG_ANGLE_MARGIN;
        if angle >= limit {
            return Err(Error::LogBranchCut { angle, limit });
        }
        // v = angle * axis = xyz * angle / sin(angle/2); the ratio tends to 2.
        let scale = if sin_half > 1e-12 {
            angle / sin_half
        } else {
            2.0
        };
        Ok(xyz * scale)
    }

    fn inverse(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        m.transpose()
    }

    fn constraint_residual(&self, m: &DMatrix<f64>) -> f64 {
        let ortho = (m.transpose() * m - DMatrix::identity(3, 3)).norm();
        let det = (m.determinant() - 1.0).abs();
        ortho.max(det)
    }

    fn project(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        linalg::closest_special_orthogonal(m)
    }

    fn has_biinvariant_metric(&self) -> bool {
        true
    }
}

fn skew(v: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0],
    )
}

/// (sin θ / θ, (1 − cos θ) / θ²), with series expansions near zero.
pub(super) fn rodrigues_coefficients(theta: f64) -> (f64, f64) {
    if theta < 1e-4 {
        let t2 = theta * theta;
        (
            1.0 - t2 / 6.0 + t2 * t2 / 120.0,
            0.5 - t2 / 24.0 + t2 * t2 / 720.0,
        )
    } else {
        let t2 = theta * theta;
        (theta.sin() / theta, (1.0 - theta.cos()) / t2)
    }
}

/// Shepperd's matrix-to-quaternion extraction. Picks the most stable of the
/// four candidate pivots and returns `(w, xyz)` with `w >= 0`.
fn quaternion_from_rotation(r: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let trace = r.trace();
    let (mut w, mut x, mut y, mut z);
    if trace > 0.0 {
        let s = (trace + 1.0).sqrt() * 2.0;
        w = 0.25 * s;
        x = (r[(2, 1)] - r[(1, 2)]) / s;
        y = (r[(0, 2)] - r[(2, 0)]) / s;
        z = (r[(1, 0)] - r[(0, 1)]) / s;
    } else if r[(0, 0)] > r[(1, 1)] && r[(0, 0)] > r[(2, 2)] {
        let s = (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt() * 2.0;
        w = (r[(2, 1)] - r[(1, 2)]) / s;
        x = 0.25 * s;
        y = (r[(0, 1)] + r[(1, 0)]) / s;
        z = (r[(0, 2)] + r[(2, 0)]) / s;
    } else if r[(1, 1)] > r[(2, 2)] {
        let s = (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt() * 2.0;
        w = (r[(0, 2)] - r[(2, 0)]) / s;
        x = (r[(0, 1)] + r[(1, 0)]) / s;
        y = 0.25 * s;
        z = (r[(1, 2)] + r[(2, 1)]) / s;
    } else {
        let s = (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt() * 2.0;
        w = (r[(1, 0)] - r[(0, 1)]) / s;
        x = (r[(0, 2)] + r[(2, 0)]) / s;
        y = (r[(1, 2)] + r[(2, 1)]) / s;
        z = 0.25 * s;
    }
    let norm = (w * w + x * x + y * y + z * z).sqrt();
    w /= norm;
    x /= norm;
    y /= norm;
    z /= norm;
    if w < 0.0 {
        w = -w;
        x = -x;
        y = -y;
        z = -z;
    }
    (w, DVector::from_vec(vec![x, y, z]))
}
