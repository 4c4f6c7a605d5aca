//! Structure tensors and curvature-style operators on the Lie algebra.
//!
//! Holds the structure constants c with `[e_i, e_j] = Σ_k c_ij^k e_k`, the
//! derived tensor `H^m_ijk = Σ_l c_il^m c_jk^l` realizing the double bracket
//! `H(X,Y,Z) = [X,[Y,Z]]`, the contraction operator `G⁰(P)` with
//! `G⁰ ξ = E[x,[x,ξ]]` for errors x of second moment P, the truncated
//! differential of the logarithm, and the bi-invariant Riemannian curvature
//! `R(X,Y)Z = -¼[[X,Y],Z]` together with its quadratic-form matrix `R_m(P)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::group::{AlgebraVector, Group};
use crate::linalg;

/// Symmetry tolerance enforced on covariance matrices.
pub const COVARIANCE_SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalue floor for the PSD check on covariance matrices.
pub const COVARIANCE_PSD_TOL: f64 = 1e-10;

/// Rank-3 array of structure constants, indexed `c[i][j][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        self.data[(i * self.n + j) * self.n + k] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }
}

/// Rank-4 array, indexed `h[i][j][k][m]` for the component `H^m_ijk`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, m: usize) -> f64 {
        self.data[((i * self.n + j) * self.n + k) * self.n + m]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, m: usize, value: f64) {
        self.data[((i * self.n + j) * self.n + k) * self.n + m] = value;
    }
}

/// Structure constants of a group together with the derived H tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTensor {
    pub c: Tensor3,
    pub h: Tensor4,
}

impl StructureTensor {
    /// Computes c from brackets of the canonical basis and H from c.
    pub fn for_group(group: &Group) -> Self {
        let n = group.dim();
        let mut c = Tensor3::zeros(n);
        for i in 0..n {
            let ei = group.basis_vector(i);
            for j in 0..n {
                let ej = group.basis_vector(j);
                let br = ei.bracket(&ej);
                for k in 0..n {
                    c.set(i, j, k, br.coords()[k]);
                }
            }
        }
        let h = h_tensor(&c);
        StructureTensor { c, h }
    }

    pub fn dim(&self) -> usize {
        self.c.dim()
    }
}

/// `H^m_ijk = Σ_l c_il^m c_jk^l`, the components of the double bracket
/// `H(e_i, e_j, e_k) = [e_i, [e_j, e_k]]`.
pub fn h_tensor(c: &Tensor3) -> Tensor4 {
    let n = c.dim();
    let mut h = Tensor4::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    let mut sum = 0.0;
                    for l in 0..n {
                        sum += c.get(i, l, m) * c.get(j, k, l);
                    }
                    h.set(i, j, k, m, sum);
                }
            }
        }
    }
    h
}

/// A validated symmetric positive-semidefinite covariance matrix in the
/// frozen algebra basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    p: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates symmetry (within 1e-12) and positive semidefiniteness
    /// (eigenvalues ≥ -1e-10).
    pub fn new(p: DMatrix<f64>) -> Result<Self> {
        linalg::require_symmetric(&p, COVARIANCE_SYMMETRY_TOL)?;
        let min_eigenvalue = linalg::min_eigenvalue(&p);
        if min_eigenvalue < -COVARIANCE_PSD_TOL {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
        }
        Ok(CovarianceMatrix { p })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.p.trace()
    }
}

/// The operator `G⁰(P)` as a matrix: `G⁰[m][k] = Σ_ij P_ij H^m_ijk`, so that
/// `G⁰ ξ = E[x, [x, ξ]]` whenever `P = E[x xᵀ]`.
pub fn g0_operator(p: &CovarianceMatrix, tensor: &StructureTensor) -> Result<DMatrix<f64>> {
    let n = tensor.dim();
    if p.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.dim(),
        });
    }
    let mut out = DMatrix::zeros(n, n);
    for m in 0..n {
        for k in 0..n {
            let mut sum = 0.0;
            for i in 0..n {
                for j in 0..n {
                    sum += p.matrix()[(i, j)] * tensor.h.get(i, j, k, m);
                }
            }
            out[(m, k)] = sum;
        }
    }
    Ok(out)
}

/// Empirical double-bracket operator `(1/N) Σ_s ad(s)·ad(s)`.
///
/// Independent oracle for [`g0_operator`]: both are linear in the second
/// moment, so feeding the empirical second moment of the samples to
/// `g0_operator` reproduces this matrix up to rounding.
pub fn g0_monte_carlo(samples: &[AlgebraVector]) -> Result<DMatrix<f64>> {
    let first = samples.first().ok_or(Error::EmptySamples)?;
    let n = first.group().dim();
    let mut acc = DMatrix::zeros(n, n);
    for s in samples {
        let ad = s.ad_matrix();
        acc += &ad * &ad;
    }
    Ok(acc / samples.len() as f64)
}

/// Truncated differential of the logarithm:
/// `(I - ½ ad_q + 1/12 ad_q²) ξ`, the expansion of
/// `d/dt log(exp(tξ) Q)` at t = 0 with `q = log Q`, keeping terms through
/// second order in `q`.
pub fn dlog_truncated(q_log: &AlgebraVector, xi: &AlgebraVector) -> AlgebraVector {
    assert!(
        q_log.group() == xi.group(),
        "dlog operands from different groups"
    );
    let n = q_log.group().dim();
    let ad = q_log.ad_matrix();
    let op = DMatrix::identity(n, n) - &ad * 0.5 + (&ad * &ad) / 12.0;
    q_log
        .group()
        .algebra(op * xi.coords())
        .expect("operator output has algebra dimension")
}

/// Bi-invariant Riemannian curvature `R(X,Y)Z = -¼ [[X,Y],Z]` for
/// right-invariant fields. Only groups carrying a bi-invariant metric
/// (SO(3), the abelian family) support this.
pub fn riemann_biinvariant(
    x: &AlgebraVector,
    y: &AlgebraVector,
    z: &AlgebraVector,
) -> Result<AlgebraVector> {
    let group = x.group();
    require_biinvariant(group, "riemann_biinvariant")?;
    assert!(
        group == y.group() && group == z.group(),
        "curvature operands from different groups"
    );
    Ok(x.bracket(y).bracket(z).scaled(-0.25))
}

/// The symmetric matrix of the quadratic form
/// `Ω ↦ E⟨R(x, Ω)Ω, x⟩` for errors x with second moment P, assembled by
/// polarization over basis pairs and explicitly symmetrized.
///
/// Satisfies `R_m(P) = -¼ · sym(G⁰(P))`; the implementation goes through the
/// curvature tensor directly so the identity `G⁰(P) = -4 R_m(P)` is a real
/// cross-check of two routes, not a tautology.
pub fn r_m_operator(p: &CovarianceMatrix, group: &Group) -> Result<DMatrix<f64>> {
    require_biinvariant(group, "r_m_operator")?;
    let n = group.dim();
    if p.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.dim(),
        });
    }
    // q(Ω) = Σ_ij P_ij ⟨R(e_i, Ω)Ω, e_j⟩, exact in the second moment.
    let quadratic = |omega: &AlgebraVector| -> f64 {
        let mut q = 0.0;
        for i in 0..n {
            let ei = group.basis_vector(i);
            let r = riemann_biinvariant(&ei, omega, omega).expect("bi-invariance already checked");
            for j in 0..n {
                q += p.matrix()[(i, j)] * r.coords()[j];
            }
        }
        q
    };
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        diag.push(quadratic(&group.basis_vector(k)));
    }
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        out[(k, k)] = diag[k];
        for l in (k + 1)..n {
            let mut coords = nalgebra::DVector::zeros(n);
            coords[k] = 1.0;
            coords[l] = 1.0;
            let sum = group.algebra(coords).expect("basis-pair vector");
            let polarized = 0.5 * (quadratic(&sum) - diag[k] - diag[l]);
            out[(k, l)] = polarized;
            out[(l, k)] = polarized;
        }
    }
    Ok(out)
}

fn require_biinvariant(group: &Group, operation: &'static str) -> Result<()> {
    if !group.has_biinvariant_metric() {
        return Err(Error::UnsupportedGroup {
            group: group.name(),
            operation,
        });
    }
    Ok(())
}
