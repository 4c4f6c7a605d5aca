//! Small dense linear-algebra helpers used throughout the toolkit.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Frobenius norm of the asymmetric part, `max_ij |m_ij - m_ji|`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Errors unless `m` is square and symmetric within `tol`.
pub fn require_symmetric(m: &DMatrix<f64>, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let residual = asymmetry(m);
    if residual > tol {
        return Err(Error::AsymmetricMatrix {
            residual,
            tolerance: tol,
        });
    }
    Ok(())
}

/// `(m + m^T) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of a symmetric matrix, sorted ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut vals: Vec<f64> = symmetrize(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Eigen decomposition of a symmetric matrix with eigenpairs sorted by
/// ascending eigenvalue. Returns `(values, vectors)` with eigenvectors as
/// columns of `vectors`.
pub fn sym_eigen_sorted(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = symmetrize(m).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m)[0]
}

/// Inverse of a symmetric positive-definite matrix through its eigen
/// decomposition. Eigenvalues at or below `floor` are treated as zero and
/// reported as unobservable directions.
pub fn invert_spd(m: &DMatrix<f64>, floor: f64) -> Result<DMatrix<f64>> {
    let (values, vectors) = sym_eigen_sorted(m);
    let min_eigenvalue = values[0];
    if min_eigenvalue <= floor {
        let null_directions = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v <= floor)
            .map(|(k, _)| vectors.column(k).iter().copied().collect())
            .collect();
        return Err(Error::SingularInformation {
            null_directions,
            min_eigenvalue,
        });
    }
    let n = values.len();
    let inv_diag =
        DMatrix::from_diagonal(&DVector::from_iterator(n, values.iter().map(|v| 1.0 / v)));
    Ok(symmetrize(&(&vectors * inv_diag * vectors.transpose())))
}

/// Nearest special-orthogonal matrix in Frobenius norm: the orthogonal polar
/// factor with the determinant corrected to +1.
pub fn closest_special_orthogonal(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd requested with u");
    let v_t = svd.v_t.expect("svd requested with v_t");
    let mut d = DVector::from_element(n, 1.0);
    if (u.determinant() * v_t.determinant()) < 0.0 {
        d[n - 1] = -1.0;
    }
    &u * DMatrix::from_diagonal(&d) * v_t
}
