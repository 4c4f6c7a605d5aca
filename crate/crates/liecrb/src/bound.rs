//! The intrinsic Cramér-Rao bound and its comparison forms.
//!
//! Three readings are provided:
//! - first order: `J⁻¹`, the Euclidean-looking bound with curvature terms
//!   dropped;
//! - the right-hand side `(I + G⁰(P)/12) J⁻¹ (I + G⁰(P)/12)ᵀ` for a caller
//!   supplied covariance (the literal inequality test, used with an
//!   empirical P̂);
//! - the fixed point of that map (the self-consistent "bound curve"),
//!   iterated from `J⁻¹`.
//!
//! On bi-invariant groups the independent comparison form
//! `J⁻¹ − (1/3)(R_m(P) J⁻¹ + J⁻¹ R_m(P))` is also available; it agrees with
//! the fixed point up to third-order terms.

use nalgebra::DMatrix;

use crate::curvature::{g0_operator, r_m_operator, CovarianceMatrix, StructureTensor};
use crate::error::{Error, Result};
use crate::fisher::InformationMatrix;
use crate::linalg;

/// Eigenvalue floor below which the information matrix counts as singular.
pub const SINGULAR_INFORMATION_FLOOR: f64 = 1e-10;
/// Default relative tolerance of the fixed-point iteration.
pub const FIXED_POINT_TOL: f64 = 1e-10;
/// Default iteration cap of the fixed-point iteration.
pub const FIXED_POINT_MAX_ITERS: usize = 100;
/// The bound neglects cubic error terms; iterates with `tr(P) > 0.1·n` are
/// outside the trusted regime and get flagged.
pub const VALIDITY_TRACE_FRACTION: f64 = 0.1;

/// Output of [`bound_fixed_point`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    /// `J⁻¹`.
    pub first_order: DMatrix<f64>,
    /// Fixed point of the second-order map.
    pub second_order: DMatrix<f64>,
    /// Iterations used by the fixed-point solve.
    pub iterations: usize,
    /// Relative Frobenius residual of the last step.
    pub residual: f64,
    /// The bi-invariant comparison form evaluated at the fixed point, when
    /// the group supports it.
    pub smith_form: Option<DMatrix<f64>>,
    pub warnings: Vec<String>,
}

/// Result of a PSD-dominance comparison `A ⪰ B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dominance {
    pub dominates: bool,
    /// Smallest eigenvalue of `A - B`; reported whether or not the
    /// comparison holds.
    pub min_eigenvalue: f64,
}

/// `J⁻¹` through a symmetric-definite solve.
///
/// A singular information matrix is physically meaningful (unobservable
/// directions), so it is reported with its null-space basis rather than
/// pseudo-inverted.
pub fn bound_first_order(j: &InformationMatrix) -> Result<DMatrix<f64>> {
    linalg::invert_spd(j.matrix(), SINGULAR_INFORMATION_FLOOR)
}

/// One application of the right-hand side of the second-order bound:
/// `(I + G⁰(P)/12) J⁻¹ (I + G⁰(P)/12)ᵀ`.
pub fn bound_second_order_map(
    p: &DMatrix<f64>,
    j: &InformationMatrix,
    tensor: &StructureTensor,
) -> Result<DMatrix<f64>> {
    let j_inv = bound_first_order(j)?;
    second_order_map_with_inverse(p, &j_inv, tensor)
}

fn second_order_map_with_inverse(
    p: &DMatrix<f64>,
    j_inv: &DMatrix<f64>,
    tensor: &StructureTensor,
) -> Result<DMatrix<f64>> {
    let n = tensor.dim();
    let cov = CovarianceMatrix::new(p.clone())?;
    let factor = DMatrix::identity(n, n) + g0_operator(&cov, tensor)? / 12.0;
    let raw = &factor * j_inv * factor.transpose();
    Ok(linalg::symmetrize(&raw))
}

/// Solves `P = (I + G⁰(P)/12) J⁻¹ (I + G⁰(P)/12)ᵀ` by Picard iteration from
/// `P₀ = J⁻¹`, stopping when `‖P_{k+1} − P_k‖_F < tol·‖P_k‖_F`.
pub fn bound_fixed_point(
    j: &InformationMatrix,
    tensor: &StructureTensor,
    tol: f64,
    max_iters: usize,
) -> Result<BoundResult> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter {
            what: format!("fixed-point tolerance must be positive, got {tol}"),
        });
    }
    let j_inv = bound_first_order(j)?;
    let mut p = j_inv.clone();
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < max_iters {
        let next = second_order_map_with_inverse(&p, &j_inv, tensor)?;
        iterations += 1;
        residual = (&next - &p).norm() / p.norm().max(f64::MIN_POSITIVE);
        p = next;
        if residual < tol {
            break;
        }
    }
    if residual >= tol {
        return Err(Error::ConvergenceFailure {
            iterations,
            residual,
            last_iterate: p,
        });
    }
    let mut warnings = Vec::new();
    let n = tensor.dim() as f64;
    if p.trace() > VALIDITY_TRACE_FRACTION * n {
        warnings.push(format!(
            "curvature-validity: tr(P) = {:.3e} exceeds {:.2}·n; the neglected cubic terms may be significant",
            p.trace(),
            VALIDITY_TRACE_FRACTION
        ));
    }
    let group = j.group();
    let smith_form = if group.has_biinvariant_metric() {
        let cov = CovarianceMatrix::new(p.clone())?;
        Some(smith_bound_biinvariant(j, &cov)?)
    } else {
        None
    };
    Ok(BoundResult {
        first_order: j_inv,
        second_order: p,
        iterations,
        residual,
        smith_form,
        warnings,
    })
}

/// The bi-invariant comparison form
/// `J⁻¹ − (1/3)(R_m(P) J⁻¹ + J⁻¹ R_m(P))`.
///
/// `R_m` is assembled from the curvature tensor directly (not from the H
/// contraction), so agreement with the fixed point genuinely cross-checks
/// the identity `G⁰(P) = -4 R_m(P)`.
pub fn smith_bound_biinvariant(
    j: &InformationMatrix,
    p: &CovarianceMatrix,
) -> Result<DMatrix<f64>> {
    let j_inv = bound_first_order(j)?;
    let rm = r_m_operator(p, j.group())?;
    Ok(&j_inv - (&rm * &j_inv + &j_inv * &rm) / 3.0)
}

/// Tests the matrix ordering `A ⪰ B` up to `tol`: true iff the smallest
/// eigenvalue of `A − B` is at least `−tol`.
pub fn psd_dominates(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> Result<Dominance> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.nrows(),
        });
    }
    linalg::require_symmetric(a, 1e-9)?;
    linalg::require_symmetric(b, 1e-9)?;
    let min_eigenvalue = linalg::min_eigenvalue(&(a - b));
    Ok(Dominance {
        dominates: min_eigenvalue >= -tol,
        min_eigenvalue,
    })
}
