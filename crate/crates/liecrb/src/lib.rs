//! Intrinsic Cramér-Rao bounds on matrix Lie groups.
//!
//! The covariance `P = E[log(g ĝ⁻¹) log(g ĝ⁻¹)ᵀ]` of any unbiased estimator
//! (in the right-invariant sense) satisfies, up to cubic error terms,
//!
//! ```text
//! P ⪰ (I + G⁰(P)/12) J(g)⁻¹ (I + G⁰(P)/12)ᵀ
//! ```
//!
//! where `J(g)` is the Fisher information in the right-invariant basis and
//! `G⁰(P) = P·H` contracts the covariance against the double-bracket tensor
//! `H(X,Y,Z) = [X,[Y,Z]]`. On the commutative control group the correction
//! vanishes and the bound collapses to the classical Euclidean `P ⪰ J⁻¹`.
//!
//! The crate provides:
//! - [`group`]: SO(3) / SE(3) / SE(2) / ℝⁿ primitives behind one strategy
//!   trait, selected by name at runtime;
//! - [`curvature`]: structure constants, the H tensor, `G⁰(P)`, the truncated
//!   differential of the logarithm, and the bi-invariant curvature used for
//!   the cross-check `G⁰(P) = -4 R_m(P)`;
//! - [`fisher`]: observation models and Monte Carlo / analytic information
//!   matrices;
//! - [`bound`]: first-order, fixed-point second-order, and bi-invariant
//!   comparison forms of the bound;
//! - [`harness`]: seeded Monte Carlo experiments with the SVD solution of
//!   Wahba's problem as the maximum-likelihood rotation estimator;
//! - [`verify`]: the runtime algebraic-identity suite behind `liecrb verify`.

pub mod bound;
pub mod curvature;
pub mod error;
pub mod fisher;
pub mod group;
pub mod harness;
pub mod linalg;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use group::{AlgebraVector, Group, GroupElement, GroupId};
