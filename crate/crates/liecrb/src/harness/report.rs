//! Report structures and their JSON / CSV renderings.
//!
//! JSON is the primary format (pretty-printed, stable field order). The CSV
//! rendering is a flat `name,value` table with one row per scalar: matrices
//! are flattened row-major with indexed names (`p_hat_0_1`), arrays get a
//! single index, nested structs join field names with `_`. Floats are
//! printed with 17 significant digits so the files round-trip exactly.

use serde::Serialize;
use serde_json::Value;

/// Matrix payload in reports: rows of an n×n matrix.
pub type MatrixData = Vec<Vec<f64>>;

/// On-disk report encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    pub fn render<T: Serialize>(self, value: &T) -> String {
        match self {
            ReportFormat::Json => render_json(value),
            ReportFormat::Csv => render_csv(value),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

pub fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> MatrixData {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Pretty JSON with a trailing newline.
pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    s.push('\n');
    s
}

/// Flat `name,value` CSV with one row per scalar.
pub fn render_csv<T: Serialize>(value: &T) -> String {
    let tree = serde_json::to_value(value).expect("report serialization cannot fail");
    let mut out = String::from("name,value\n");
    flatten("", &tree, &mut out);
    out
}

fn flatten(prefix: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (key, child) in map {
                let name = if prefix.is_empty() {
                    key.clone()
                } else {
                    format!("{prefix}_{key}")
                };
                flatten(&name, child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}_{i}"), child, out);
            }
        }
        Value::Null => {}
        Value::Bool(b) => {
            out.push_str(prefix);
            out.push(',');
            out.push_str(if *b { "true" } else { "false" });
            out.push('\n');
        }
        Value::Number(n) => {
            out.push_str(prefix);
            out.push(',');
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format!("{:.16e}", n.as_f64().unwrap()));
            }
            out.push('\n');
        }
        Value::String(s) => {
            out.push_str(prefix);
            out.push(',');
            out.push_str(&escape_csv(s));
            out.push('\n');
        }
    }
}

fn escape_csv(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Summary of one PSD-dominance comparison in an experiment report.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct DominanceSummary {
    /// Smallest eigenvalue of `P̂ − bound` (restricted to the observable
    /// subspace in degenerate configurations).
    pub min_eigenvalue: f64,
    /// Statistical tolerance: the configured multiple of the Frobenius norm
    /// of the jackknife standard-error matrix of P̂.
    pub stat_tolerance: f64,
    pub holds: bool,
    /// False when the unbiasedness gate failed; the bound presumes an
    /// unbiased estimator, so the comparison is reported but not claimed.
    pub applicable: bool,
}

/// Full output of one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ExperimentReport {
    pub group: String,
    pub model: String,
    pub n_trials: usize,
    pub n_obs: usize,
    pub seed: u64,
    /// Algebra coordinates of the resolved true group element.
    pub true_g_log: Vec<f64>,
    /// Empirical error covariance P̂ in the right-invariant basis.
    pub p_hat: MatrixData,
    /// Entrywise jackknife standard errors of P̂.
    pub p_hat_stderr: MatrixData,
    /// Intrinsic bias estimate (mean of the error logs).
    pub bias: Vec<f64>,
    /// Gate threshold `3·sqrt(tr(P̂)/N)`.
    pub bias_threshold: f64,
    pub bias_ok: bool,
    /// Empirical third moment E‖w‖³ of the error logs.
    pub third_moment: f64,
    pub information: MatrixData,
    pub information_source: String,
    pub bound_first_order: MatrixData,
    /// Fixed point of the curvature-corrected map (the self-consistent
    /// "bound curve").
    pub bound_second_order: Option<MatrixData>,
    /// The right-hand side of the bound with the empirical P̂ inserted: the
    /// literal inequality the dominance check runs against.
    pub bound_second_order_at_p_hat: Option<MatrixData>,
    pub fixed_point_iterations: Option<usize>,
    pub fixed_point_residual: Option<f64>,
    pub smith_form: Option<MatrixData>,
    pub dominance_first: DominanceSummary,
    pub dominance_second: Option<DominanceSummary>,
    /// tr(P̂) / tr(J⁻¹), restricted to the observable subspace when the
    /// information matrix is singular.
    pub efficiency_ratio: f64,
    /// Per-trial error logs, one row per trial.
    pub per_trial_errors: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// Error statistics only: what `simulate` writes. The dominance comparison
/// and efficiency ratio are the `compare` command's additional output.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct SimulationReport {
    pub group: String,
    pub model: String,
    pub n_trials: usize,
    pub n_obs: usize,
    pub seed: u64,
    pub true_g_log: Vec<f64>,
    pub p_hat: MatrixData,
    pub p_hat_stderr: MatrixData,
    pub bias: Vec<f64>,
    pub bias_threshold: f64,
    pub bias_ok: bool,
    pub third_moment: f64,
    pub per_trial_errors: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl From<&ExperimentReport> for SimulationReport {
    fn from(r: &ExperimentReport) -> Self {
        SimulationReport {
            group: r.group.clone(),
            model: r.model.clone(),
            n_trials: r.n_trials,
            n_obs: r.n_obs,
            seed: r.seed,
            true_g_log: r.true_g_log.clone(),
            p_hat: r.p_hat.clone(),
            p_hat_stderr: r.p_hat_stderr.clone(),
            bias: r.bias.clone(),
            bias_threshold: r.bias_threshold,
            bias_ok: r.bias_ok,
            third_moment: r.third_moment,
            per_trial_errors: r.per_trial_errors.clone(),
            warnings: r.warnings.clone(),
        }
    }
}

/// Output of the `bound` command: the bound forms at a configured model and
/// base point, without simulation.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct BoundComputationReport {
    pub group: String,
    pub model: String,
    pub seed: u64,
    pub true_g_log: Vec<f64>,
    pub information: MatrixData,
    pub information_source: String,
    pub bound_first_order: MatrixData,
    pub bound_second_order: MatrixData,
    pub fixed_point_iterations: usize,
    pub fixed_point_residual: f64,
    pub smith_form: Option<MatrixData>,
    pub warnings: Vec<String>,
}
