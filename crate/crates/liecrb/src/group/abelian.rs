//! ℝⁿ under addition, embedded as (n+1)×(n+1) upper-triangular matrices.
//!
//! `hat(v)` puts `v` in the last column, so the algebra is nilpotent of order
//! two and the exponential series terminates: `exp(hat(v)) = I + hat(v)`.
//! The zero bracket makes this the control group for the Euclidean limit of
//! every bound formula.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;

use super::{GroupId, GroupOps};

pub(super) struct AbelianRn {
    n: usize,
}

impl AbelianRn {
    pub(super) fn new(n: usize) -> Self {
        AbelianRn { n }
    }
}

impl GroupOps for AbelianRn {
    fn id(&self) -> GroupId {
        GroupId::AbelianRn
    }

    fn name(&self) -> String {
        format!("abelian{}", self.n)
    }

    fn algebra_dim(&self) -> usize {
        self.n
    }

    fn matrix_size(&self) -> usize {
        self.n + 1
    }

    fn generator(&self, i: usize) -> DMatrix<f64> {
        assert!(i < self.n, "abelian{} has {} generators", self.n, self.n);
        let mut m = DMatrix::zeros(self.n + 1, self.n + 1);
        m[(i, self.n)] = 1.0;
        m
    }

    fn exp(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::identity(self.n + 1, self.n + 1);
        for i in 0..self.n {
            m[(i, self.n)] = v[i];
        }
        m
    }

    fn log(&self, m: &DMatrix<f64>) -> Result<DVector<f64>> {
        Ok(DVector::from_iterator(
            self.n,
            (0..self.n).map(|i| m[(i, self.n)]),
        ))
    }

    fn inverse(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::identity(self.n + 1, self.n + 1);
        for i in 0..self.n {
            out[(i, self.n)] = -m[(i, self.n)];
        }
        out
    }

    fn constraint_residual(&self, m: &DMatrix<f64>) -> f64 {
        // Everything except the last column offsets must match the identity.
        let mut worst = 0.0f64;
        for i in 0..=self.n {
            for j in 0..=self.n {
                if j == self.n && i < self.n {
                    continue;
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((m[(i, j)] - expected).abs());
            }
        }
        worst
    }

    fn project(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::identity(self.n + 1, self.n + 1);
        for i in 0..self.n {
            out[(i, self.n)] = m[(i, self.n)];
        }
        out
    }

    fn has_biinvariant_metric(&self) -> bool {
        true
    }
}
