//! Runtime algebraic-identity suite behind `liecrb verify`.
//!
//! Re-runs the structural identities every group must satisfy — round trips,
//! bracket antisymmetry, Jacobi, closure, tensor consistency, the truncated
//! Dlog order, and on bi-invariant groups the mixed-product property and the
//! curvature identity `G⁰(P) = -4 R_m(P)` — as machine-checkable pass/fail
//! entries. A deliberate fault hook is available so the suite's own
//! sensitivity can be demonstrated.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::curvature::{
    dlog_truncated, g0_monte_carlo, g0_operator, r_m_operator, riemann_biinvariant,
    CovarianceMatrix,
};
use crate::error::Result;
use crate::group::{series::exp_series, AlgebraVector, Group};
use crate::harness::random_algebra_vector;
use crate::linalg;
use crate::rng::substream;

/// Deliberate corruptions for exercising the suite (test hooks).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultInjection {
    /// Flips the sign of the `[e0, e1]` structure-constant slice of the
    /// bracket used inside the Jacobi check. The corruption is asymmetric on
    /// purpose: a global sign flip is an algebra isomorphism and would leave
    /// Jacobi intact, whereas breaking antisymmetry in one slot does not.
    BracketSign,
}

impl std::str::FromStr for FaultInjection {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "bracket-sign" => Ok(FaultInjection::BracketSign),
            other => Err(format!("unknown fault `{other}` (expected bracket-sign)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub fault: Option<FaultInjection>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 42,
            fault: None,
        }
    }
}

/// One pass/fail entry of the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed value and the threshold it was held against.
    pub detail: String,
}

/// Machine-readable outcome of `verify` for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub group: String,
    pub seed: u64,
    pub all_passed: bool,
    pub checks: Vec<CheckResult>,
}

struct Suite {
    group: Group,
    rng: rand_chacha::ChaCha12Rng,
    fault: Option<FaultInjection>,
    checks: Vec<CheckResult>,
}

impl Suite {
    fn record(&mut self, name: &str, worst: f64, threshold: f64) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed: worst <= threshold,
            detail: format!("worst {worst:.3e}, threshold {threshold:.1e}"),
        });
    }

    fn random(&mut self, scale: f64) -> AlgebraVector {
        random_algebra_vector(&self.group, &mut self.rng, scale)
    }

    /// Bracket as used inside the Jacobi check; the fault hook corrupts it.
    fn bracket(&self, x: &AlgebraVector, y: &AlgebraVector) -> AlgebraVector {
        let mut b = x.bracket(y);
        if self.fault == Some(FaultInjection::BracketSign) && self.group.dim() >= 2 {
            let slice = self
                .group
                .basis_vector(0)
                .bracket(&self.group.basis_vector(1));
            let coords = b.coords() - slice.coords() * (2.0 * x.coords()[0] * y.coords()[1]);
            b = self.group.algebra(coords).expect("same dimension");
        }
        b
    }
}

/// Runs the full identity suite for one group.
pub fn run_checks(group: &Group, options: VerifyOptions) -> Result<VerifyReport> {
    let mut suite = Suite {
        group: group.clone(),
        rng: substream(options.seed, 0),
        fault: options.fault,
        checks: Vec::new(),
    };
    let n = group.dim();

    // vee(hat(v)) = v, exactly.
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let v = suite.random(2.0);
        let back = group.vee(&v.hat())?;
        worst = worst.max((back.coords() - v.coords()).norm());
    }
    suite.record("vee-hat-roundtrip", worst, 0.0);

    // log(exp(v)) = v for ‖v‖ < 1.
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut v = suite.random(1.0);
        if v.norm() >= 1.0 {
            v = v.scaled(0.9 / v.norm());
        }
        let back = v.exp().log()?;
        worst = worst.max((back.coords() - v.coords()).norm());
    }
    suite.record("exp-log-roundtrip", worst, 1e-10);

    // Closed-form exponential against the scaling-and-squaring series.
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let v = suite.random(1.2);
        worst = worst.max((v.exp().matrix() - exp_series(&v.hat())).norm());
    }
    suite.record("exp-closed-form-vs-series", worst, 1e-12);

    // [x,y] = -[y,x].
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let x = suite.random(1.0);
        let y = suite.random(1.0);
        worst = worst.max((x.bracket(&y).coords() + y.bracket(&x).coords()).norm());
    }
    suite.record("bracket-antisymmetry", worst, 1e-14);

    // [x,[y,z]] + [y,[z,x]] + [z,[x,y]] = 0 (runs through the fault hook).
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let x = suite.random(1.0);
        let y = suite.random(1.0);
        let z = suite.random(1.0);
        let sum = suite.bracket(&x, &suite.bracket(&y, &z)).coords()
            + suite.bracket(&y, &suite.bracket(&z, &x)).coords()
            + suite.bracket(&z, &suite.bracket(&x, &y)).coords();
        worst = worst.max(sum.norm());
    }
    suite.record("jacobi-identity", worst, 1e-12);

    // Constraint residual after 10^4 compositions.
    let mut acc = group.identity();
    for _ in 0..10_000 {
        let step = suite.random(0.5).exp();
        acc = acc.compose(&step)?;
    }
    suite.record(
        "group-closure-10k-compositions",
        acc.constraint_residual(),
        1e-9,
    );

    // ad_matrix columns against the cached structure constants.
    let c = group.structure_constants();
    let mut worst = 0.0f64;
    for i in 0..n {
        let ad = group.basis_vector(i).ad_matrix();
        for j in 0..n {
            for k in 0..n {
                worst = worst.max((ad[(k, j)] - c.get(i, j, k)).abs());
            }
        }
    }
    suite.record("ad-consistency", worst, 0.0);

    // c_ij^k = -c_ji^k.
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                worst = worst.max((c.get(i, j, k) + c.get(j, i, k)).abs());
            }
        }
    }
    suite.record("structure-constant-antisymmetry", worst, 0.0);

    // H contraction against the double bracket, exactly. On the abelian
    // group this doubles as the H-tensor-zero check.
    let tensor = group.structure_tensor();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let direct = group
                    .basis_vector(i)
                    .bracket(&group.basis_vector(j).bracket(&group.basis_vector(k)));
                for m in 0..n {
                    worst = worst.max((tensor.h.get(i, j, k, m) - direct.coords()[m]).abs());
                }
            }
        }
    }
    suite.record("h-tensor-vs-double-bracket", worst, 0.0);

    // g0_operator at the empirical second moment vs the sample average of
    // ad(s)² (linearity identity, not statistical).
    let samples: Vec<AlgebraVector> = (0..100).map(|_| suite.random(0.8)).collect();
    let mut second_moment = DMatrix::zeros(n, n);
    for s in &samples {
        second_moment += s.coords() * s.coords().transpose();
    }
    second_moment /= samples.len() as f64;
    let p = CovarianceMatrix::new(linalg::symmetrize(&second_moment))?;
    let diff = (g0_operator(&p, tensor)? - g0_monte_carlo(&samples)?).norm();
    suite.record("g0-oracle-equivalence", diff, 1e-10);

    // Truncated Dlog against the numerical directional derivative of log.
    if tensor.c.is_zero() {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let q = suite.random(2.0);
            let xi = suite.random(1.0);
            worst = worst.max((dlog_truncated(&q, &xi).coords() - xi.coords()).norm());
        }
        suite.record("dlog-is-identity-on-abelian", worst, 0.0);
    } else {
        let order = dlog_observed_order(&suite.group, options.seed)?;
        suite.checks.push(CheckResult {
            name: "dlog-truncation-order".into(),
            passed: order >= 2.7,
            detail: format!("observed order {order:.2}, threshold 2.7"),
        });
    }

    if group.has_biinvariant_metric() {
        // ⟨[x,y],z⟩ = ⟨[z,x],y⟩.
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let x = suite.random(1.0);
            let y = suite.random(1.0);
            let z = suite.random(1.0);
            let lhs = x.bracket(&y).coords().dot(z.coords());
            let rhs = z.bracket(&x).coords().dot(y.coords());
            worst = worst.max((lhs - rhs).abs());
        }
        suite.record("mixed-product-property", worst, 1e-12);

        // G⁰(P) = -4 R_m(P) for random PSD P.
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let a = DMatrix::from_fn(n, n, |_, _| {
                use rand::Rng;
                suite.rng.random_range(-0.3..0.3)
            });
            let p = CovarianceMatrix::new(linalg::symmetrize(&(&a * a.transpose())))?;
            let g0 = g0_operator(&p, tensor)?;
            let rm = r_m_operator(&p, group)?;
            let delta = linalg::symmetrize(&g0) + 4.0 * rm;
            worst = worst.max(delta.amax());
        }
        suite.record("g0-equals-minus-4-rm", worst, 1e-12);

        // ⟨R(x,ξ)ξ,x⟩ two ways: direct curvature vs -¼ double bracket plus
        // the mixed product.
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let x = suite.random(1.0);
            let xi = suite.random(1.0);
            let direct = riemann_biinvariant(&x, &xi, &xi)?.coords().dot(x.coords());
            let via_bracket = -0.25 * x.bracket(&x.bracket(&xi)).coords().dot(xi.coords());
            worst = worst.max((direct - via_bracket).abs());
        }
        suite.record("curvature-symmetry", worst, 1e-12);
    }

    let all_passed = suite.checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        group: group.name(),
        seed: options.seed,
        all_passed,
        checks: suite.checks,
    })
}

/// Least-squares slope of log error against log ‖log Q‖ for the truncated
/// Dlog, sampled at ‖log Q‖ ∈ {0.4, 0.2, 0.1, 0.05}. The neglected remainder
/// is cubic, so the observed order must be ≥ 2.7.
pub fn dlog_observed_order(group: &Group, seed: u64) -> Result<f64> {
    let scales = [0.4, 0.2, 0.1, 0.05];
    let mut points = Vec::with_capacity(scales.len());
    let mut rng = substream(seed, 1);
    let t = 1e-6;
    for &h in &scales {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let mut q_log = random_algebra_vector(group, &mut rng, 1.0);
            q_log = q_log.scaled(h / q_log.norm());
            let mut xi = random_algebra_vector(group, &mut rng, 1.0);
            xi = xi.scaled(1.0 / xi.norm());
            let q = q_log.exp();
            let plus = xi.scaled(t).exp().compose(&q)?.log()?;
            let minus = xi.scaled(-t).exp().compose(&q)?.log()?;
            let fd = (plus.coords() - minus.coords()) / (2.0 * t);
            let truncated = dlog_truncated(&q_log, &xi);
            worst = worst.max((truncated.coords() - fd).norm());
        }
        points.push((h.ln(), worst.max(1e-300).ln()));
    }
    // Ordinary least squares slope of ln(err) vs ln(h).
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}
