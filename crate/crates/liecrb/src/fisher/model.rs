//! Observation models `p(X | g)`.
//!
//! Models are strategy objects: a log-density, a sampler, and an optional
//! analytic score. The two built-in families are the Gaussian
//! vector-observation model behind Wahba's problem on SO(3) and a
//! concentrated Gaussian on an arbitrary group, `X = exp(w)·g` with
//! `w ~ N(0, Σ)`.

use nalgebra::{DMatrix, DVector, Vector3};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::group::{AlgebraVector, Group, GroupElement};
use crate::linalg;

/// One draw from an observation model. Either a list of noisy 3-vector
/// observations (Wahba) or a list of noisy group elements (concentrated
/// Gaussian with `n_obs` repetitions).
#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    Vectors(Vec<Vector3<f64>>),
    Elements(Vec<GroupElement>),
}

/// A family of densities parameterized by group elements.
pub trait ObservationModel: Send + Sync {
    /// The parameter group.
    fn group(&self) -> &Group;
    /// Registry name of the model family.
    fn name(&self) -> &'static str;
    /// `log p(X | g)` including the Gaussian normalizer.
    fn log_density(&self, obs: &Observation, g: &GroupElement) -> Result<f64>;
    /// Draws one observation from `p(· | g)`.
    fn sample(&self, g: &GroupElement, rng: &mut ChaCha12Rng) -> Observation;
    /// Analytic score `d/dt|₀ log p(X | exp(tξ) g)` when the model provides
    /// one; `None` falls back to central differences.
    fn analytic_score(
        &self,
        _obs: &Observation,
        _g: &GroupElement,
        _xi: &AlgebraVector,
    ) -> Option<f64> {
        None
    }
}

/// Gaussian vector observations of known reference directions:
/// `X_i = g d_i + σ ε_i` with `ε_i ~ N(0, I₃)`. The maximum-likelihood
/// estimator of g is the solution of Wahba's problem.
pub struct WahbaVectors {
    group: Group,
    directions: Vec<Vector3<f64>>,
    sigma: f64,
}

impl WahbaVectors {
    /// Reference directions must be unit vectors (within 1e-12) and σ > 0.
    pub fn new(directions: Vec<Vector3<f64>>, sigma: f64) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidParameter {
                what: "Wahba model needs at least one reference direction".into(),
            });
        }
        for (i, d) in directions.iter().enumerate() {
            if (d.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter {
                    what: format!("direction {i} is not unit norm (|d| = {})", d.norm()),
                });
            }
        }
        if sigma <= 0.0 {
            return Err(Error::InvalidParameter {
                what: format!("sigma must be positive, got {sigma}"),
            });
        }
        Ok(WahbaVectors {
            group: Group::so3(),
            directions,
            sigma,
        })
    }

    pub fn directions(&self) -> &[Vector3<f64>] {
        &self.directions
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    fn rotated(&self, g: &GroupElement) -> Vec<Vector3<f64>> {
        self.directions
            .iter()
            .map(|d| {
                let m = g.matrix();
                Vector3::new(
                    m[(0, 0)] * d.x + m[(0, 1)] * d.y + m[(0, 2)] * d.z,
                    m[(1, 0)] * d.x + m[(1, 1)] * d.y + m[(1, 2)] * d.z,
                    m[(2, 0)] * d.x + m[(2, 1)] * d.y + m[(2, 2)] * d.z,
                )
            })
            .collect()
    }
}

impl ObservationModel for WahbaVectors {
    fn group(&self) -> &Group {
        &self.group
    }

    fn name(&self) -> &'static str {
        "wahba"
    }

    fn log_density(&self, obs: &Observation, g: &GroupElement) -> Result<f64> {
        let Observation::Vectors(xs) = obs else {
            return Err(Error::InvalidParameter {
                what: "Wahba model expects vector observations".into(),
            });
        };
        if xs.len() != self.directions.len() {
            return Err(Error::DimensionMismatch {
                expected: self.directions.len(),
                got: xs.len(),
            });
        }
        let rotated = self.rotated(g);
        let mut sq = 0.0;
        for (x, u) in xs.iter().zip(&rotated) {
            sq += (x - u).norm_squared();
        }
        let k = xs.len() as f64;
        Ok(-0.5 * sq / (self.sigma * self.sigma)
            - 1.5 * k * (2.0 * std::f64::consts::PI * self.sigma * self.sigma).ln())
    }

    fn sample(&self, g: &GroupElement, rng: &mut ChaCha12Rng) -> Observation {
        let rotated = self.rotated(g);
        let xs = rotated
            .into_iter()
            .map(|u| {
                let noise = Vector3::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                );
                u + noise * self.sigma
            })
            .collect();
        Observation::Vectors(xs)
    }

    fn analytic_score(
        &self,
        obs: &Observation,
        g: &GroupElement,
        xi: &AlgebraVector,
    ) -> Option<f64> {
        let Observation::Vectors(xs) = obs else {
            return None;
        };
        if xs.len() != self.directions.len() {
            return None;
        }
        // (1/σ²) Σ_i (X_i − g d_i)ᵀ (ξ × g d_i): the residual against the
        // velocity of the rotated direction under exp(tξ)·g.
        let rotated = self.rotated(g);
        let axis = Vector3::new(xi.coords()[0], xi.coords()[1], xi.coords()[2]);
        let mut score = 0.0;
        for (x, u) in xs.iter().zip(&rotated) {
            score += (x - u).dot(&axis.cross(u));
        }
        Some(score / (self.sigma * self.sigma))
    }
}

/// Concentrated Gaussian on a group: `n_obs` independent observations
/// `X_j = exp(w_j)·g` with `w_j ~ N(0, Σ)` on the algebra.
///
/// The density is evaluated on the algebra coordinates `log(X g⁻¹)` with the
/// Gaussian normalizer only; the Jacobian-of-exp correction is O(‖Σ‖) and
/// deliberately omitted, consistent with the small-error regime of the
/// bounds.
pub struct ConcentratedGaussian {
    group: Group,
    covariance: DMatrix<f64>,
    precision: DMatrix<f64>,
    cholesky_l: DMatrix<f64>,
    log_normalizer: f64,
    n_obs: usize,
}

impl ConcentratedGaussian {
    /// `covariance` must be symmetric positive definite of the group's
    /// algebra dimension.
    pub fn new(group: Group, covariance: DMatrix<f64>, n_obs: usize) -> Result<Self> {
        let n = group.dim();
        if covariance.nrows() != n || covariance.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: covariance.nrows().max(covariance.ncols()),
            });
        }
        linalg::require_symmetric(&covariance, 1e-12)?;
        if n_obs == 0 {
            return Err(Error::InvalidParameter {
                what: "n_obs must be at least 1".into(),
            });
        }
        let chol = covariance
            .clone()
            .cholesky()
            .ok_or(Error::InvalidParameter {
                what: "algebra covariance must be positive definite".into(),
            })?;
        let precision = chol.inverse();
        let det = chol.determinant();
        let log_normalizer = -0.5 * (n as f64) * (2.0 * std::f64::consts::PI).ln() - 0.5 * det.ln();
        Ok(ConcentratedGaussian {
            group,
            covariance,
            precision,
            cholesky_l: chol.unpack(),
            log_normalizer,
            n_obs,
        })
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }
}

impl ObservationModel for ConcentratedGaussian {
    fn group(&self) -> &Group {
        &self.group
    }

    fn name(&self) -> &'static str {
        "concentrated-gaussian"
    }

    fn log_density(&self, obs: &Observation, g: &GroupElement) -> Result<f64> {
        let Observation::Elements(xs) = obs else {
            return Err(Error::InvalidParameter {
                what: "concentrated Gaussian expects group-element observations".into(),
            });
        };
        if xs.len() != self.n_obs {
            return Err(Error::DimensionMismatch {
                expected: self.n_obs,
                got: xs.len(),
            });
        }
        let g_inv = g.inverse();
        let mut total = 0.0;
        for x in xs {
            let w = x.compose(&g_inv)?.log()?;
            let quad = w.coords().dot(&(&self.precision * w.coords()));
            total += self.log_normalizer - 0.5 * quad;
        }
        Ok(total)
    }

    fn sample(&self, g: &GroupElement, rng: &mut ChaCha12Rng) -> Observation {
        let n = self.group.dim();
        let xs = (0..self.n_obs)
            .map(|_| {
                let z =
                    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
                let w = self
                    .group
                    .algebra(&self.cholesky_l * z)
                    .expect("covariance dimension matches group");
                w.exp().compose(g).expect("same group")
            })
            .collect();
        Observation::Elements(xs)
    }
}
