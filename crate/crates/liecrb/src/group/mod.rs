//! Matrix Lie group primitives.
//!
//! Each concrete group (SO(3), SE(3), SE(2), the abelian control group ℝⁿ)
//! implements the [`GroupOps`] strategy trait: generators of a frozen
//! canonical basis, closed-form exponential/logarithm, closed-form inverse
//! and the group-membership constraint. Everything else — hat/vee, bracket,
//! adjoint, structure constants — is derived generically from the generators,
//! so all groups share one code path for the algebraic machinery.
//!
//! Canonical bases (frozen; every downstream tensor and matrix is expressed
//! in these coordinates):
//! - so(3): the three skew generators with `hat(e1)[2][1] = 1`,
//!   `hat(e1)[1][2] = -1` etc., i.e. `hat(v) w = v × w`.
//! - se(3): coordinates ordered (rotation x,y,z, translation x,y,z) in 4×4
//!   homogeneous form.
//! - se(2): coordinates ordered (rotation, translation x,y) in 3×3
//!   homogeneous form.
//! - abelian ℝⁿ: embedded as (n+1)×(n+1) matrices `I + hat(v)` with `v` in
//!   the last column; the algebra is nilpotent of order two.
//!
//! The inner product on the algebra is the standard dot product on
//! coordinates in these bases.

mod abelian;
mod registry;
mod se2;
mod se3;
pub mod series;
mod so3;

use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::curvature::StructureTensor;
use crate::error::{Error, Result};

pub use registry::{builtin_group_names, group_by_name};

/// Group-membership tolerance for [`GroupElement`] construction.
pub const GROUP_CONSTRAINT_TOL: f64 = 1e-9;
/// Subspace tolerance for [`Group::vee`].
pub const ALGEBRA_SUBSPACE_TOL: f64 = 1e-9;
/// Principal logarithms error out when the rotation angle reaches `π` minus
/// this margin.
pub const LOG_ANGLE_MARGIN: f64 = 1e-6;

/// Identifies one of the built-in group families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupId {
    So3,
    Se3,
    Se2,
    AbelianRn,
}

/// Strategy trait implemented by each concrete matrix Lie group.
///
/// Implementations supply the basis generators and the closed-form maps; the
/// generic machinery in [`Group`] derives hat/vee, brackets, adjoints and
/// structure constants from them. `exp` falls back to the scaling-and-squaring
/// series when a group does not override it.
pub trait GroupOps: Send + Sync {
    fn id(&self) -> GroupId;
    /// Registry name, e.g. `so3` or `abelian3`.
    fn name(&self) -> String;
    /// Dimension n of the Lie algebra.
    fn algebra_dim(&self) -> usize;
    /// Side length of the ambient square matrices.
    fn matrix_size(&self) -> usize;
    /// `hat(e_i)`, the i-th canonical generator.
    fn generator(&self, i: usize) -> DMatrix<f64>;
    /// Group exponential of `hat(v)`.
    fn exp(&self, v: &DVector<f64>) -> DMatrix<f64> {
        series::exp_series(&hat_in(self, v))
    }
    /// Principal logarithm, as algebra coordinates.
    fn log(&self, m: &DMatrix<f64>) -> Result<DVector<f64>>;
    /// Closed-form group inverse.
    fn inverse(&self, m: &DMatrix<f64>) -> DMatrix<f64>;
    /// How far `m` is from satisfying the group constraints (0 = member).
    fn constraint_residual(&self, m: &DMatrix<f64>) -> f64;
    /// Nearest group element; used by the harness after long composition
    /// chains, never inside `compose`.
    fn project(&self, m: &DMatrix<f64>) -> DMatrix<f64>;
    /// Whether the group carries a bi-invariant metric in the frozen basis.
    fn has_biinvariant_metric(&self) -> bool;
}

fn hat_in(ops: &(impl GroupOps + ?Sized), v: &DVector<f64>) -> DMatrix<f64> {
    let m = ops.matrix_size();
    let mut out = DMatrix::zeros(m, m);
    for i in 0..ops.algebra_dim() {
        if v[i] != 0.0 {
            out += ops.generator(i) * v[i];
        }
    }
    out
}

struct GroupInner {
    ops: Box<dyn GroupOps>,
    generators: Vec<DMatrix<f64>>,
    /// Squared Frobenius norms of the generators; the canonical bases are
    /// Frobenius-orthogonal, so vee is a per-generator projection.
    generator_norms: Vec<f64>,
    tensor: OnceLock<StructureTensor>,
}

/// Shared, immutable descriptor of a concrete group.
///
/// Cheap to clone; the structure-constant tensor is computed once per
/// descriptor and shared read-only.
#[derive(Clone)]
pub struct Group {
    inner: Arc<GroupInner>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({})", self.name())
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.id() == other.id() && self.dim() == other.dim()
    }
}

impl Group {
    fn from_ops(ops: Box<dyn GroupOps>) -> Self {
        let n = ops.algebra_dim();
        let generators: Vec<DMatrix<f64>> = (0..n).map(|i| ops.generator(i)).collect();
        let generator_norms = generators.iter().map(|g| g.norm_squared()).collect();
        Group {
            inner: Arc::new(GroupInner {
                ops,
                generators,
                generator_norms,
                tensor: OnceLock::new(),
            }),
        }
    }

    /// The rotation group SO(3).
    pub fn so3() -> Self {
        Self::from_ops(Box::new(so3::So3))
    }

    /// The rigid-motion group SE(3).
    pub fn se3() -> Self {
        Self::from_ops(Box::new(se3::Se3))
    }

    /// The planar rigid-motion group SE(2).
    pub fn se2() -> Self {
        Self::from_ops(Box::new(se2::Se2))
    }

    /// ℝⁿ under addition, embedded as (n+1)×(n+1) matrices.
    pub fn abelian(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                what: "abelian group dimension must be at least 1".into(),
            });
        }
        Ok(Self::from_ops(Box::new(abelian::AbelianRn::new(n))))
    }

    /// Look a group up by its registry name (`so3`, `se3`, `se2`,
    /// `abelian<n>`).
    pub fn by_name(name: &str) -> Result<Self> {
        registry::group_by_name(name)
    }

    pub fn id(&self) -> GroupId {
        self.inner.ops.id()
    }

    pub fn name(&self) -> String {
        self.inner.ops.name()
    }

    /// Lie algebra dimension n.
    pub fn dim(&self) -> usize {
        self.inner.ops.algebra_dim()
    }

    /// Ambient square-matrix side.
    pub fn matrix_size(&self) -> usize {
        self.inner.ops.matrix_size()
    }

    pub fn has_biinvariant_metric(&self) -> bool {
        self.inner.ops.has_biinvariant_metric()
    }

    /// The identity element.
    pub fn identity(&self) -> GroupElement {
        GroupElement {
            mat: DMatrix::identity(self.matrix_size(), self.matrix_size()),
            group: self.clone(),
        }
    }

    /// Wraps coordinates into an [`AlgebraVector`], checking the length.
    pub fn algebra(&self, coords: DVector<f64>) -> Result<AlgebraVector> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: coords.len(),
            });
        }
        Ok(AlgebraVector {
            coords,
            group: self.clone(),
        })
    }

    /// Convenience constructor from a slice.
    pub fn algebra_from(&self, coords: &[f64]) -> Result<AlgebraVector> {
        self.algebra(DVector::from_row_slice(coords))
    }

    /// The zero algebra element.
    pub fn zero_algebra(&self) -> AlgebraVector {
        AlgebraVector {
            coords: DVector::zeros(self.dim()),
            group: self.clone(),
        }
    }

    /// The i-th canonical basis vector of the algebra.
    pub fn basis_vector(&self, i: usize) -> AlgebraVector {
        assert!(i < self.dim(), "basis index {i} out of range");
        let mut coords = DVector::zeros(self.dim());
        coords[i] = 1.0;
        AlgebraVector {
            coords,
            group: self.clone(),
        }
    }

    /// `hat(e_i)` as a matrix.
    pub fn generator(&self, i: usize) -> &DMatrix<f64> {
        &self.inner.generators[i]
    }

    /// Wraps a matrix into a [`GroupElement`], enforcing the group constraint
    /// within [`GROUP_CONSTRAINT_TOL`].
    pub fn element(&self, mat: DMatrix<f64>) -> Result<GroupElement> {
        let m = self.matrix_size();
        if mat.nrows() != m || mat.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: mat.nrows().max(mat.ncols()),
            });
        }
        let residual = self.inner.ops.constraint_residual(&mat);
        if residual > GROUP_CONSTRAINT_TOL {
            return Err(Error::NotInGroup {
                residual,
                tolerance: GROUP_CONSTRAINT_TOL,
            });
        }
        Ok(GroupElement {
            mat,
            group: self.clone(),
        })
    }

    /// Inverse of hat: projects `m` onto the algebra subspace and errors if
    /// the projection residual exceeds [`ALGEBRA_SUBSPACE_TOL`].
    pub fn vee(&self, m: &DMatrix<f64>) -> Result<AlgebraVector> {
        let size = self.matrix_size();
        if m.nrows() != size || m.ncols() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: m.nrows().max(m.ncols()),
            });
        }
        let mut coords = DVector::zeros(self.dim());
        for i in 0..self.dim() {
            coords[i] = self.inner.generators[i].dot(m) / self.inner.generator_norms[i];
        }
        let reconstructed = hat_in(self.inner.ops.as_ref(), &coords);
        let residual = (m - reconstructed).norm();
        if residual > ALGEBRA_SUBSPACE_TOL {
            return Err(Error::NotInAlgebra {
                residual,
                tolerance: ALGEBRA_SUBSPACE_TOL,
            });
        }
        Ok(AlgebraVector {
            coords,
            group: self.clone(),
        })
    }

    /// Structure constants c with `[e_i, e_j] = Σ_k c[i][j][k] e_k`, computed
    /// once per descriptor and cached.
    pub fn structure_constants(&self) -> &crate::curvature::Tensor3 {
        &self.structure_tensor().c
    }

    /// The cached structure tensor (c together with the derived H tensor).
    pub fn structure_tensor(&self) -> &StructureTensor {
        self.inner
            .tensor
            .get_or_init(|| StructureTensor::for_group(self))
    }

    /// Nearest group element to `g` (polar-style re-projection). Only the
    /// Monte Carlo harness calls this, after long composition chains.
    pub fn project(&self, g: &GroupElement) -> GroupElement {
        GroupElement {
            mat: self.inner.ops.project(&g.mat),
            group: self.clone(),
        }
    }

    fn same_group(&self, other: &Group) -> Result<()> {
        if self != other {
            return Err(Error::GroupMismatch {
                left: self.name(),
                right: other.name(),
            });
        }
        Ok(())
    }
}

/// An element of a matrix Lie group: the ambient square matrix plus its
/// descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    mat: DMatrix<f64>,
    group: Group,
}

impl GroupElement {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Group composition `self · other` (matrix product). Invariants are
    /// preserved by the product; no silent re-projection happens here.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        self.group.same_group(&other.group)?;
        Ok(GroupElement {
            mat: &self.mat * &other.mat,
            group: self.group.clone(),
        })
    }

    /// Closed-form group inverse (transpose for SO(3), block formulas for
    /// SE(3)/SE(2), offset negation for the abelian group).
    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            mat: self.group.inner.ops.inverse(&self.mat),
            group: self.group.clone(),
        }
    }

    /// Principal logarithm. Errors with the diagnostic angle when the element
    /// sits at or beyond the branch cut.
    pub fn log(&self) -> Result<AlgebraVector> {
        let coords = self.group.inner.ops.log(&self.mat)?;
        Ok(AlgebraVector {
            coords,
            group: self.group.clone(),
        })
    }

    /// Residual of the group-membership constraint.
    pub fn constraint_residual(&self) -> f64 {
        self.group.inner.ops.constraint_residual(&self.mat)
    }
}

/// Coordinates of a Lie algebra element in the frozen canonical basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraVector {
    coords: DVector<f64>,
    group: Group,
}

impl AlgebraVector {
    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    /// `Σ_i v_i hat(e_i)`, the algebra element as an ambient matrix.
    pub fn hat(&self) -> DMatrix<f64> {
        hat_in(self.group.inner.ops.as_ref(), &self.coords)
    }

    /// Group exponential (closed form per group, series fallback otherwise).
    pub fn exp(&self) -> GroupElement {
        GroupElement {
            mat: self.group.inner.ops.exp(&self.coords),
            group: self.group.clone(),
        }
    }

    /// Lie bracket `vee(hat(x) hat(y) - hat(y) hat(x))`.
    ///
    /// Panics if the operands live in different groups.
    pub fn bracket(&self, other: &AlgebraVector) -> AlgebraVector {
        assert!(
            self.group == other.group,
            "bracket of vectors from different groups ({} vs {})",
            self.group.name(),
            other.group.name()
        );
        let commutator = self.hat() * other.hat() - other.hat() * self.hat();
        self.group
            .vee(&commutator)
            .expect("commutator of algebra elements stays in the algebra")
    }

    /// The adjoint matrix `ad_x` with `ad_x · y = [x, y]` for all y.
    pub fn ad_matrix(&self) -> DMatrix<f64> {
        let n = self.group.dim();
        let c = self.group.structure_constants();
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let mut entry = 0.0;
                for i in 0..n {
                    entry += self.coords[i] * c.get(i, j, k);
                }
                out[(k, j)] = entry;
            }
        }
        out
    }

    /// Scales the vector by `t`.
    pub fn scaled(&self, t: f64) -> AlgebraVector {
        AlgebraVector {
            coords: &self.coords * t,
            group: self.group.clone(),
        }
    }
}

#[cfg(test)]
mod tests;
