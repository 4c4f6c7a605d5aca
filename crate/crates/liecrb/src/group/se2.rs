//! SE(2): planar rigid motions as 3×3 homogeneous matrices.
//!
//! Algebra coordinates are ordered (rotation, translation x, translation y).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::{GroupId, GroupOps, LOG_ANGLE_MARGIN};

pub(super) struct Se2;

impl GroupOps for Se2 {
    fn id(&self) -> GroupId {
        GroupId::Se2
    }

    fn name(&self) -> String {
        "se2".into()
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
                m[(1, 0)] = 1.0;
                m[(0, 1)] = -1.0;
            }
            1 => m[(0, 2)] = 1.0,
            2 => m[(1, 2)] = 1.0,
            _ => panic!("se(2) has three generators"),
        }
        m
    }

    fn exp(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let theta = v[0];
        let (cos, sin) = (theta.cos(), theta.sin());
        let (a, b) = translation_coefficients(theta);
        let mut m = DMatrix::identity(3, 3);
        m[(0, 0)] = cos;
        m[(0, 1)] = -sin;
        m[(1, 0)] = sin;
        m[(1, 1)] = cos;
        m[(0, 2)] = a * v[1] - b * v[2];
        m[(1, 2)] = b * v[1] + a * v[2];
        m
    }

    fn log(&self, m: &DMatrix<f64>) -> Result<DVector<f64>> {
        let theta = m[(1, 0)].atan2(m[(0, 0)]);
        let limit = PI - LOG_ANGLE_MARGIN;
        if theta.abs() >= limit {
            return Err(Error::LogBranchCut {
                angle: theta.abs(),
                limit,
            });
        }
        let (a, b) = translation_coefficients(theta);
        let det = a * a + b * b;
        let (tx, ty) = (m[(0, 2)], m[(1, 2)]);
        Ok(DVector::from_vec(vec![
            theta,
            (a * tx + b * ty) / det,
            (-b * tx + a * ty) / det,
        ]))
    }

    fn inverse(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let (c, s) = (m[(0, 0)], m[(1, 0)]);
        let (tx, ty) = (m[(0, 2)], m[(1, 2)]);
        let mut out = DMatrix::identity(3, 3);
        out[(0, 0)] = c;
        out[(0, 1)] = s;
        out[(1, 0)] = -s;
        out[(1, 1)] = c;
        out[(0, 2)] = -(c * tx + s * ty);
        out[(1, 2)] = -(-s * tx + c * ty);
        out
    }

    fn constraint_residual(&self, m: &DMatrix<f64>) -> f64 {
        let r = m.view((0, 0), (2, 2)).into_owned();
        let ortho = (r.transpose() * &r - DMatrix::identity(2, 2)).norm();
        let det = (r.determinant() - 1.0).abs();
        let bottom = m[(2, 0)]
            .abs()
            .max(m[(2, 1)].abs())
            .max((m[(2, 2)] - 1.0).abs());
        ortho.max(det).max(bottom)
    }

    fn project(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        // Nearest planar rotation from the angle of the noisy 2x2 block.
        let theta = (m[(1, 0)] - m[(0, 1)]).atan2(m[(0, 0)] + m[(1, 1)]);
        let mut out = DMatrix::identity(3, 3);
        out[(0, 0)] = theta.cos();
        out[(0, 1)] = -theta.sin();
        out[(1, 0)] = theta.sin();
        out[(1, 1)] = theta.cos();
        out[(0, 2)] = m[(0, 2)];
        out[(1, 2)] = m[(1, 2)];
        out
    }

    fn has_biinvariant_metric(&self) -> bool {
        false
    }
}

/// Entries of V(θ) = [[a, -b], [b, a]]: a = sin θ / θ, b = (1 − cos θ) / θ.
fn translation_coefficients(theta: f64) -> (f64, f64) {
    if theta.abs() < 1e-4 {
        let t2 = theta * theta;
        (
            1.0 - t2 / 6.0 + t2 * t2 / 120.0,
            theta * (0.5 - t2 / 24.0 + t2 * t2 / 720.0),
        )
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta)
    }
}
