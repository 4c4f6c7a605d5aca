//! SE(3): rigid motions of 3-space as 4×4 homogeneous matrices.
//!
//! Algebra coordinates are ordered (rotation x,y,z, translation x,y,z).

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::linalg;

use super::so3::rodrigues_coefficients;
use super::{GroupId, GroupOps};

pub(super) struct Se3;

impl GroupOps for Se3 {
    fn id(&self) -> GroupId {
        GroupId::Se3
    }

    fn name(&self) -> String {
        "se3".into()
    }

    fn algebra_dim(&self) -> usize {
        6
    }

    fn matrix_size(&self) -> usize {
        4
    }

    fn generator(&self, i: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(4, 4);
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
            3..=5 => m[(i - 3, 3)] = 1.0,
            _ => panic!("se(3) has six generators"),
        }
        m
    }

    fn exp(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let omega = v.rows(0, 3).into_owned();
        let rho = v.rows(3, 3).into_owned();
        let theta = omega.norm();
        let k = skew3(&omega);
        let (a, b) = rodrigues_coefficients(theta);
        let c = third_coefficient(theta);
        let eye = DMatrix::identity(3, 3);
        let r = &eye + &k * a + &k * &k * b;
        let v_mat = &eye + &k * b + &k * &k * c;
        let t = v_mat * rho;
        assemble(&r, &t)
    }

    fn log(&self, m: &DMatrix<f64>) -> Result<DVector<f64>> {
        let r = m.view((0, 0), (3, 3)).into_owned();
        let t = DVector::from_iterator(3, (0..3).map(|i| m[(i, 3)]));
        let omega = super::so3::So3.log(&r)?;
        let theta = omega.norm();
        let k = skew3(&omega);
        let (_, b) = rodrigues_coefficients(theta);
        let c = third_coefficient(theta);
        let v_mat = DMatrix::identity(3, 3) + &k * b + &k * &k * c;
        let rho = v_mat
            .lu()
            .solve(&t)
            .expect("V(ω) is invertible inside the principal domain");
        let mut out = DVector::zeros(6);
        out.rows_mut(0, 3).copy_from(&omega);
        out.rows_mut(3, 3).copy_from(&rho);
        Ok(out)
    }

    fn inverse(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let r = m.view((0, 0), (3, 3)).into_owned();
        let t = DVector::from_iterator(3, (0..3).map(|i| m[(i, 3)]));
        let r_t = r.transpose();
        let t_inv = -(&r_t * t);
        assemble(&r_t, &t_inv)
    }

    fn constraint_residual(&self, m: &DMatrix<f64>) -> f64 {
        let r = m.view((0, 0), (3, 3)).into_owned();
        let ortho = (r.transpose() * &r - DMatrix::identity(3, 3)).norm();
        let det = (r.determinant() - 1.0).abs();
        let mut bottom = 0.0f64;
        for j in 0..3 {
            bottom = bottom.max(m[(3, j)].abs());
        }
        bottom = bottom.max((m[(3, 3)] - 1.0).abs());
        ortho.max(det).max(bottom)
    }

    fn project(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let r = linalg::closest_special_orthogonal(&m.view((0, 0), (3, 3)).into_owned());
        let t = DVector::from_iterator(3, (0..3).map(|i| m[(i, 3)]));
        assemble(&r, &t)
    }

    fn has_biinvariant_metric(&self) -> bool {
        false
    }
}

fn assemble(r: &DMatrix<f64>, t: &DVector<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::identity(4, 4);
    m.view_mut((0, 0), (3, 3)).copy_from(r);
    for i in 0..3 {
        m[(i, 3)] = t[i];
    }
    m
}

fn skew3(v: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0],
    )
}

/// (θ − sin θ) / θ³ with a series expansion near zero.
fn third_coefficient(theta: f64) -> f64 {
    if theta < 1e-4 {
        let t2 = theta * theta;
        1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
    } else {
        (theta - theta.sin()) / (theta * theta * theta)
    }
}
