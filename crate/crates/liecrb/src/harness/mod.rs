//! Monte Carlo verification harness.
//!
//! Runs seeded estimation experiments, measures the right-invariant error
//! statistics `w = log(g ĝ⁻¹)`, and compares the empirical covariance
//! against the bound forms. Trials are independent given per-trial
//! substreams derived from `(seed, trial_index)`; the reduction is performed
//! in ascending trial order, so reports are bitwise reproducible for a fixed
//! config regardless of worker count.

mod report;

pub use report::{
    matrix_rows, render_csv, render_json, BoundComputationReport, DominanceSummary,
    ExperimentReport, MatrixData, ReportFormat, SimulationReport,
};

use nalgebra::{DMatrix, DVector, Vector3};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::{self, Dominance};
use crate::curvature::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::fisher::{
    fisher_matrix, wahba_fisher_analytic, ConcentratedGaussian, InformationMatrix, Observation,
    ObservationModel, WahbaVectors,
};
use crate::group::{AlgebraVector, Group, GroupElement, GroupId};
use crate::linalg;
use crate::rng::{substream, TRIAL_STREAM_BASE, TRUE_POINT_STREAM};

/// Directions whose Gram matrix has second eigenvalue below this threshold
/// count as collinear.
const DIRECTION_RANK_TOL: f64 = 1e-9;

/// Uniform random algebra vector with coordinates in `[-scale, scale]`.
pub fn random_algebra_vector(group: &Group, rng: &mut impl Rng, scale: f64) -> AlgebraVector {
    let n = group.dim();
    let coords = DVector::from_iterator(n, (0..n).map(|_| rng.random_range(-scale..scale)));
    group.algebra(coords).expect("dimension matches group")
}

/// Exponential of a uniform random algebra vector.
pub fn random_group_element(group: &Group, rng: &mut impl Rng, scale: f64) -> GroupElement {
    random_algebra_vector(group, rng, scale).exp()
}

/// Solves Wahba's problem: the rotation minimizing `Σ ‖X_i − R d_i‖²`,
/// which is the maximum-likelihood estimator under isotropic Gaussian noise.
///
/// Computed from the SVD of `B = Σ X_i d_iᵀ` with the determinant corrected
/// to +1, so the result is always a proper rotation.
pub fn wahba_ml_estimator(
    observations: &[Vector3<f64>],
    directions: &[Vector3<f64>],
) -> Result<GroupElement> {
    if observations.len() != directions.len() {
        return Err(Error::DimensionMismatch {
            expected: directions.len(),
            got: observations.len(),
        });
    }
    if directions.len() < 2 || direction_rank(directions) < 2 {
        return Err(Error::DegenerateProblem {
            reason: "Wahba needs at least two non-collinear reference directions".into(),
        });
    }
    let mut b = DMatrix::zeros(3, 3);
    for (x, d) in observations.iter().zip(directions) {
        for r in 0..3 {
            for c in 0..3 {
                b[(r, c)] += x[r] * d[c];
            }
        }
    }
    let rotation = linalg::closest_special_orthogonal(&b);
    Group::so3().element(rotation)
}

fn direction_rank(directions: &[Vector3<f64>]) -> usize {
    let mut gram = DMatrix::zeros(3, 3);
    for d in directions {
        for r in 0..3 {
            for c in 0..3 {
                gram[(r, c)] += d[r] * d[c];
            }
        }
    }
    linalg::sym_eigenvalues(&gram)
        .iter()
        .filter(|&&v| v > DIRECTION_RANK_TOL)
        .count()
}

/// Restricted estimator for collinear direction sets: the minimal rotation
/// taking the reference direction to the averaged observation. Its error has
/// no component along the unobservable axis, which keeps the degenerate
/// configuration inside the observable subspace.
fn collinear_wahba_estimator(
    observations: &[Vector3<f64>],
    directions: &[Vector3<f64>],
) -> Result<GroupElement> {
    let d = directions[0];
    let mut m = Vector3::zeros();
    for (x, di) in observations.iter().zip(directions) {
        m += x * di.dot(&d);
    }
    let norm = m.norm();
    if norm < 1e-12 {
        return Err(Error::DegenerateProblem {
            reason: "observations average to zero; direction undetermined".into(),
        });
    }
    let target = m / norm;
    let axis = d.cross(&target);
    let sin = axis.norm();
    let cos = d.dot(&target);
    let group = Group::so3();
    if sin < 1e-15 {
        if cos > 0.0 {
            return Ok(group.identity());
        }
        return Err(Error::DegenerateProblem {
            reason: "observed direction is antipodal to the reference".into(),
        });
    }
    let angle = sin.atan2(cos);
    let w = axis * (angle / sin);
    Ok(group.algebra_from(&[w.x, w.y, w.z])?.exp())
}

/// Error logs `w_k = log(g ĝ_k⁻¹)` for a list of estimates. Any estimate
/// beyond the branch cut fails with the offending trial index.
pub fn error_logs(true_g: &GroupElement, estimates: &[GroupElement]) -> Result<Vec<AlgebraVector>> {
    estimates
        .iter()
        .enumerate()
        .map(|(index, est)| {
            true_g
                .compose(&est.inverse())
                .and_then(|e| e.log())
                .map_err(|source| Error::Trial {
                    index,
                    source: Box::new(source),
                })
        })
        .collect()
}

/// Empirical error covariance `P̂ = (1/N) Σ w_k w_kᵀ` of the right-invariant
/// error logs.
pub fn empirical_error_covariance(
    true_g: &GroupElement,
    estimates: &[GroupElement],
) -> Result<CovarianceMatrix> {
    let logs = error_logs(true_g, estimates)?;
    second_moment(&logs)
}

fn second_moment(logs: &[AlgebraVector]) -> Result<CovarianceMatrix> {
    let first = logs.first().ok_or(Error::EmptySamples)?;
    let n = first.group().dim();
    let mut acc = DMatrix::zeros(n, n);
    for w in logs {
        acc += w.coords() * w.coords().transpose();
    }
    CovarianceMatrix::new(acc / logs.len() as f64)
}

/// Intrinsic bias `b̂ = (1/N) Σ log(g ĝ_k⁻¹)`.
pub fn bias_vector(true_g: &GroupElement, estimates: &[GroupElement]) -> Result<AlgebraVector> {
    let logs = error_logs(true_g, estimates)?;
    let first = logs.first().ok_or(Error::EmptySamples)?;
    let group = first.group().clone();
    let mut acc = DVector::zeros(group.dim());
    for w in &logs {
        acc += w.coords();
    }
    group.algebra(acc / logs.len() as f64)
}

/// Entrywise jackknife standard errors of the mean-of-outer-products
/// estimator P̂. For a plain mean this reduces to
/// `sqrt(Σ_k (w_ki w_kj − P̂_ij)² / (N(N−1)))`.
fn jackknife_standard_errors(logs: &[AlgebraVector], p_hat: &DMatrix<f64>) -> DMatrix<f64> {
    let n = logs.len();
    let dim = p_hat.nrows();
    if n < 2 {
        return DMatrix::zeros(dim, dim);
    }
    let mut acc = DMatrix::zeros(dim, dim);
    for w in logs {
        for i in 0..dim {
            for j in 0..dim {
                let dev = w.coords()[i] * w.coords()[j] - p_hat[(i, j)];
                acc[(i, j)] += dev * dev;
            }
        }
    }
    acc.map(|v: f64| (v / (n as f64 * (n as f64 - 1.0))).sqrt())
}

/// How the true group element is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrueGroupElement {
    Named(TrueGroupName),
    /// Algebra coordinates; the element is their exponential.
    Algebra(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrueGroupName {
    Identity,
    Random,
}

impl Default for TrueGroupElement {
    fn default() -> Self {
        TrueGroupElement::Named(TrueGroupName::Identity)
    }
}

/// Observation-model block of an experiment config. `kind` selects the
/// family; the remaining fields apply to the matching family only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Wahba: unit reference directions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<[f64; 3]>>,
    /// Wahba: isotropic observation noise σ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Concentrated Gaussian: algebra-noise covariance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covariance: Option<CovarianceSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Wahba,
    ConcentratedGaussian,
}

/// Covariance shorthand in configs: a scalar (σ²·I), a diagonal, or full
/// rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CovarianceSpec {
    Scalar(f64),
    Diagonal(Vec<f64>),
    Full(Vec<Vec<f64>>),
}

impl CovarianceSpec {
    pub fn to_matrix(&self, n: usize) -> Result<DMatrix<f64>> {
        match self {
            CovarianceSpec::Scalar(v) => Ok(DMatrix::identity(n, n) * *v),
            CovarianceSpec::Diagonal(d) => {
                if d.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: d.len(),
                    });
                }
                Ok(DMatrix::from_diagonal(&DVector::from_row_slice(d)))
            }
            CovarianceSpec::Full(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: rows.len(),
                    });
                }
                let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                Ok(DMatrix::from_row_slice(n, n, &flat))
            }
        }
    }
}

/// Numerical knobs of an experiment; every field has a documented default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Base tolerance for PSD checks (default 1e-9).
    pub psd_tol: f64,
    /// Relative tolerance of the bound fixed-point iteration (default 1e-10).
    pub fixed_point_tol: f64,
    /// Iteration cap of the fixed-point solve (default 100).
    pub max_iterations: usize,
    /// Bias gate: ‖b̂‖ must not exceed this multiple of sqrt(tr(P̂)/N)
    /// (default 3).
    pub bias_gate_multiplier: f64,
    /// Dominance comparisons run against the bound minus this multiple of
    /// the jackknife standard error of P̂ (default 3).
    pub dominance_se_multiplier: f64,
    /// Warn when the empirical third moment E‖w‖³ exceeds this threshold
    /// (default 0.1): the bound neglects cubic terms.
    pub third_moment_threshold: f64,
    /// Sample count for Monte Carlo information matrices when no closed
    /// form applies (default 100000).
    pub fisher_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            psd_tol: 1e-9,
            fixed_point_tol: bound::FIXED_POINT_TOL,
            max_iterations: bound::FIXED_POINT_MAX_ITERS,
            bias_gate_multiplier: 3.0,
            dominance_se_multiplier: 3.0,
            third_moment_threshold: 0.1,
            fisher_samples: 100_000,
        }
    }
}

fn default_n_trials() -> usize {
    10_000
}

fn default_seed() -> u64 {
    42
}

/// Full description of one Monte Carlo experiment. Identical configs (same
/// seed) produce bitwise-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Registry name of the parameter group.
    pub group: String,
    pub model: ModelConfig,
    #[serde(default)]
    pub true_g: TrueGroupElement,
    /// Number of Monte Carlo trials (default 10000).
    #[serde(default = "default_n_trials")]
    pub n_trials: usize,
    /// Observations per trial. Wahba cycles its direction list up to this
    /// count; default is the direction count (one round) or 1 for the
    /// concentrated Gaussian.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_obs: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Test hook: composes `exp(offset)` onto every estimate, deliberately
    /// biasing the estimator so the unbiasedness gate can be exercised.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator_bias: Option<Vec<f64>>,
}

enum Estimator {
    WahbaSvd(Vec<Vector3<f64>>),
    WahbaCollinear(Vec<Vector3<f64>>),
    IntrinsicMean,
}

impl Estimator {
    fn estimate(&self, obs: &Observation) -> Result<GroupElement> {
        match (self, obs) {
            (Estimator::WahbaSvd(dirs), Observation::Vectors(xs)) => wahba_ml_estimator(xs, dirs),
            (Estimator::WahbaCollinear(dirs), Observation::Vectors(xs)) => {
                collinear_wahba_estimator(xs, dirs)
            }
            (Estimator::IntrinsicMean, Observation::Elements(xs)) => intrinsic_mean(xs),
            _ => Err(Error::InvalidParameter {
                what: "observation shape does not match the estimator".into(),
            }),
        }
    }
}

/// Iterative intrinsic mean: `ĝ ← exp(mean log(X_j ĝ⁻¹)) · ĝ` until the
/// update stalls. Exact in one step on the abelian group; the final estimate
/// is re-projected onto the group after the composition chain.
fn intrinsic_mean(xs: &[GroupElement]) -> Result<GroupElement> {
    let first = xs.first().ok_or(Error::EmptySamples)?;
    let group = first.group().clone();
    let mut est = first.clone();
    for _ in 0..100 {
        let mut delta = DVector::zeros(group.dim());
        for x in xs {
            delta += x.compose(&est.inverse())?.log()?.coords();
        }
        delta /= xs.len() as f64;
        let step = delta.norm();
        est = group.algebra(delta)?.exp().compose(&est)?;
        if step < 1e-13 {
            break;
        }
    }
    Ok(group.project(&est))
}

struct PreparedModel {
    model: Box<dyn ObservationModel>,
    estimator: Estimator,
    n_obs: usize,
    /// Analytic information matrix when the model family has a closed form.
    analytic_information: Option<DMatrix<f64>>,
}

fn prepare_model(
    config: &ExperimentConfig,
    group: &Group,
    true_g: &GroupElement,
) -> Result<PreparedModel> {
    match config.model.kind {
        ModelKind::Wahba => {
            if group.id() != GroupId::So3 {
                return Err(Error::UnsupportedGroup {
                    group: group.name(),
                    operation: "wahba model",
                });
            }
            let raw = config
                .model
                .directions
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter {
                    what: "wahba model needs `directions`".into(),
                })?;
            let sigma = config.model.sigma.ok_or_else(|| Error::InvalidParameter {
                what: "wahba model needs `sigma`".into(),
            })?;
            if raw.is_empty() {
                return Err(Error::InvalidParameter {
                    what: "wahba model needs at least one direction".into(),
                });
            }
            let base: Vec<Vector3<f64>> =
                raw.iter().map(|d| Vector3::new(d[0], d[1], d[2])).collect();
            let n_obs = config.n_obs.unwrap_or(base.len());
            if n_obs == 0 {
                return Err(Error::InvalidParameter {
                    what: "n_obs must be at least 1".into(),
                });
            }
            // Cycle the direction list up to n_obs total observations.
            let expanded: Vec<Vector3<f64>> = (0..n_obs).map(|i| base[i % base.len()]).collect();
            let model = WahbaVectors::new(expanded.clone(), sigma)?;
            let estimator = if direction_rank(&expanded) >= 2 {
                Estimator::WahbaSvd(expanded.clone())
            } else {
                Estimator::WahbaCollinear(expanded.clone())
            };
            let analytic = wahba_fisher_analytic(&expanded, sigma, true_g)?;
            Ok(PreparedModel {
                model: Box::new(model),
                estimator,
                n_obs,
                analytic_information: Some(analytic.matrix().clone()),
            })
        }
        ModelKind::ConcentratedGaussian => {
            let spec = config
                .model
                .covariance
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter {
                    what: "concentrated-gaussian model needs `covariance`".into(),
                })?;
            let covariance = spec.to_matrix(group.dim())?;
            let n_obs = config.n_obs.unwrap_or(1);
            let model = ConcentratedGaussian::new(group.clone(), covariance, n_obs)?;
            // On the abelian group the Fisher information is exactly
            // n_obs·Σ⁻¹; elsewhere it is integrated by Monte Carlo.
            let analytic = if group.id() == GroupId::AbelianRn {
                Some(model.precision() * n_obs as f64)
            } else {
                None
            };
            Ok(PreparedModel {
                model: Box::new(model),
                estimator: Estimator::IntrinsicMean,
                n_obs,
                analytic_information: analytic,
            })
        }
    }
}

fn resolve_true_g(config: &ExperimentConfig, group: &Group) -> Result<GroupElement> {
    match &config.true_g {
        TrueGroupElement::Named(TrueGroupName::Identity) => Ok(group.identity()),
        TrueGroupElement::Named(TrueGroupName::Random) => {
            let mut rng = substream(config.seed, TRUE_POINT_STREAM);
            Ok(random_group_element(group, &mut rng, 0.6))
        }
        TrueGroupElement::Algebra(coords) => Ok(group.algebra_from(coords)?.exp()),
    }
}

fn summarize(d: Dominance, stat_tolerance: f64, applicable: bool) -> DominanceSummary {
    DominanceSummary {
        min_eigenvalue: d.min_eigenvalue,
        stat_tolerance,
        holds: d.dominates,
        applicable,
    }
}

/// Computes the information matrix and every bound form for a configured
/// model and base point, without running any trials. Backs the `bound`
/// command; a singular information matrix propagates as an error carrying
/// the unobservable directions.
pub fn compute_bounds(config: &ExperimentConfig) -> Result<BoundComputationReport> {
    let group = Group::by_name(&config.group)?;
    let true_g = resolve_true_g(config, &group)?;
    let prepared = prepare_model(config, &group, &true_g)?;
    let (information, information_source) = match &prepared.analytic_information {
        Some(j) => (
            InformationMatrix::new(j.clone(), true_g.clone())?,
            "analytic".to_string(),
        ),
        None => (
            fisher_matrix(
                prepared.model.as_ref(),
                &true_g,
                config.tolerances.fisher_samples,
                config.seed,
            )?,
            "monte-carlo".to_string(),
        ),
    };
    let result = bound::bound_fixed_point(
        &information,
        group.structure_tensor(),
        config.tolerances.fixed_point_tol,
        config.tolerances.max_iterations,
    )?;
    Ok(BoundComputationReport {
        group: group.name(),
        model: match config.model.kind {
            ModelKind::Wahba => "wahba".to_string(),
            ModelKind::ConcentratedGaussian => "concentrated-gaussian".to_string(),
        },
        seed: config.seed,
        true_g_log: true_g.log()?.coords().iter().copied().collect(),
        information: matrix_rows(information.matrix()),
        information_source,
        bound_first_order: matrix_rows(&result.first_order),
        bound_second_order: matrix_rows(&result.second_order),
        fixed_point_iterations: result.iterations,
        fixed_point_residual: result.residual,
        smith_form: result.smith_form.as_ref().map(matrix_rows),
        warnings: result.warnings,
    })
}

/// Runs a full experiment: sample, estimate, accumulate the error
/// statistics, compute the information matrix and the bound forms, and test
/// dominance.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.n_trials == 0 {
        return Err(Error::InvalidParameter {
            what: "n_trials must be at least 1".into(),
        });
    }
    let group = Group::by_name(&config.group)?;
    let true_g = resolve_true_g(config, &group)?;
    let prepared = prepare_model(config, &group, &true_g)?;

    let bias_offset = match &config.estimator_bias {
        Some(coords) => Some(group.algebra_from(coords)?),
        None => None,
    };

    let model = prepared.model.as_ref();
    let estimator = &prepared.estimator;
    let logs: Result<Vec<AlgebraVector>> = (0..config.n_trials)
        .into_par_iter()
        .map(|t| {
            let wrap = |source: Error| Error::Trial {
                index: t,
                source: Box::new(source),
            };
            let mut rng = substream(config.seed, TRIAL_STREAM_BASE + t as u64);
            let obs = model.sample(&true_g, &mut rng);
            let mut estimate = estimator.estimate(&obs).map_err(wrap)?;
            if let Some(offset) = &bias_offset {
                estimate = offset.exp().compose(&estimate).map_err(wrap)?;
            }
            true_g
                .compose(&estimate.inverse())
                .and_then(|e| e.log())
                .map_err(wrap)
        })
        .collect();
    let logs = logs?;

    let n = config.n_trials as f64;
    let dim = group.dim();
    let p_hat = second_moment(&logs)?;
    let stderr = jackknife_standard_errors(&logs, p_hat.matrix());
    let mut bias_acc = DVector::zeros(dim);
    let mut third_moment = 0.0;
    for w in &logs {
        bias_acc += w.coords();
        third_moment += w.norm().powi(3);
    }
    let bias = bias_acc / n;
    third_moment /= n;
    let bias_threshold = config.tolerances.bias_gate_multiplier * (p_hat.trace() / n).sqrt();
    let bias_ok = bias.norm() <= bias_threshold;

    let mut warnings = Vec::new();
    if matches!(prepared.estimator, Estimator::WahbaCollinear(_)) {
        warnings.push(
            "degenerate-wahba: collinear directions; using the minimal-rotation estimator with the null direction excluded"
                .to_string(),
        );
    }
    if third_moment > config.tolerances.third_moment_threshold {
        warnings.push(format!(
            "third-moment: E|w|^3 = {:.3e} exceeds {:.2e}; neglected cubic terms may be significant",
            third_moment, config.tolerances.third_moment_threshold
        ));
    }
    if !bias_ok {
        warnings.push(format!(
            "unbiasedness gate failed (|b| = {:.3e} > {:.3e}); dominance results are not applicable",
            bias.norm(),
            bias_threshold
        ));
    }

    let (information, information_source) = match &prepared.analytic_information {
        Some(j) => (
            InformationMatrix::new(j.clone(), true_g.clone())?,
            "analytic".to_string(),
        ),
        None => (
            fisher_matrix(
                model,
                &true_g,
                config.tolerances.fisher_samples,
                config.seed,
            )?,
            "monte-carlo".to_string(),
        ),
    };

    // The statistical tolerance never drops below the configured numerical
    // floor, so the comparison stays meaningful for tiny trial counts.
    let stat_tolerance =
        (config.tolerances.dominance_se_multiplier * stderr.norm()).max(config.tolerances.psd_tol);

    let report = match bound::bound_fixed_point(
        &information,
        group.structure_tensor(),
        config.tolerances.fixed_point_tol,
        config.tolerances.max_iterations,
    ) {
        Ok(result) => {
            warnings.extend(result.warnings.iter().cloned());
            // The dominance verdict tests the literal inequality: the
            // empirical P̂ inserted on the right-hand side of the bound. The
            // fixed point is reported alongside as the self-consistent curve.
            let literal = bound::bound_second_order_map(
                p_hat.matrix(),
                &information,
                group.structure_tensor(),
            )?;
            let d1 = bound::psd_dominates(p_hat.matrix(), &result.first_order, stat_tolerance)?;
            let d2 = bound::psd_dominates(p_hat.matrix(), &literal, stat_tolerance)?;
            ExperimentReport {
                group: group.name(),
                model: model.name().to_string(),
                n_trials: config.n_trials,
                n_obs: prepared.n_obs,
                seed: config.seed,
                true_g_log: true_g.log()?.coords().iter().copied().collect(),
                p_hat: matrix_rows(p_hat.matrix()),
                p_hat_stderr: matrix_rows(&stderr),
                bias: bias.iter().copied().collect(),
                bias_threshold,
                bias_ok,
                third_moment,
                information: matrix_rows(information.matrix()),
                information_source,
                bound_first_order: matrix_rows(&result.first_order),
                bound_second_order: Some(matrix_rows(&result.second_order)),
                bound_second_order_at_p_hat: Some(matrix_rows(&literal)),
                fixed_point_iterations: Some(result.iterations),
                fixed_point_residual: Some(result.residual),
                smith_form: result.smith_form.as_ref().map(matrix_rows),
                dominance_first: summarize(d1, stat_tolerance, bias_ok),
                dominance_second: Some(summarize(d2, stat_tolerance, bias_ok)),
                efficiency_ratio: p_hat.trace() / result.first_order.trace(),
                per_trial_errors: logs
                    .iter()
                    .map(|w| w.coords().iter().copied().collect())
                    .collect(),
                warnings,
            }
        }
        Err(Error::SingularInformation {
            null_directions, ..
        }) => {
            // Restrict everything to the observable subspace and compare
            // only the first-order bound: the curvature contraction mixes in
            // unobservable directions, so it has no restricted analogue.
            warnings.push(format!(
                "singular-information: {} unobservable direction(s); dominance and efficiency are restricted to the observable subspace and the second-order bound is skipped",
                null_directions.len()
            ));
            let (values, vectors) = linalg::sym_eigen_sorted(information.matrix());
            let observable: Vec<usize> = (0..dim)
                .filter(|&k| values[k] > bound::SINGULAR_INFORMATION_FLOOR)
                .collect();
            let r = observable.len();
            if r == 0 {
                return Err(Error::SingularInformation {
                    null_directions,
                    min_eigenvalue: values[0],
                });
            }
            let mut q = DMatrix::zeros(dim, r);
            for (col, &k) in observable.iter().enumerate() {
                q.set_column(col, &vectors.column(k));
            }
            let j_restricted = q.transpose() * information.matrix() * &q;
            let j_inv_restricted =
                linalg::invert_spd(&j_restricted, bound::SINGULAR_INFORMATION_FLOOR)?;
            let p_restricted = linalg::symmetrize(&(q.transpose() * p_hat.matrix() * &q));
            let d1 = bound::psd_dominates(&p_restricted, &j_inv_restricted, stat_tolerance)?;
            let lifted = &q * &j_inv_restricted * q.transpose();
            ExperimentReport {
                group: group.name(),
                model: model.name().to_string(),
                n_trials: config.n_trials,
                n_obs: prepared.n_obs,
                seed: config.seed,
                true_g_log: true_g.log()?.coords().iter().copied().collect(),
                p_hat: matrix_rows(p_hat.matrix()),
                p_hat_stderr: matrix_rows(&stderr),
                bias: bias.iter().copied().collect(),
                bias_threshold,
                bias_ok,
                third_moment,
                information: matrix_rows(information.matrix()),
                information_source,
                bound_first_order: matrix_rows(&lifted),
                bound_second_order: None,
                bound_second_order_at_p_hat: None,
                fixed_point_iterations: None,
                fixed_point_residual: None,
                smith_form: None,
                dominance_first: summarize(d1, stat_tolerance, bias_ok),
                dominance_second: None,
                efficiency_ratio: p_restricted.trace() / j_inv_restricted.trace(),
                per_trial_errors: logs
                    .iter()
                    .map(|w| w.coords().iter().copied().collect())
                    .collect(),
                warnings,
            }
        }
        Err(other) => return Err(other),
    };
    Ok(report)
}

#[cfg(test)]
mod tests;
