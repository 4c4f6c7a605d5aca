//! Generic matrix exponential by scaling and squaring.
//!
//! Fallback for groups without closed-form exponentials and the independent
//! cross-check for the closed forms. Accuracy is favoured over speed: the
//! argument is scaled below 1/2 in norm, a fixed 13-term truncation is
//! applied (matching the order of the degree-13 Padé methods), then the
//! result is squared back up.

use nalgebra::DMatrix;

const TERMS: usize = 13;

/// `exp(m)` for a square matrix.
pub fn exp_series(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "exp_series needs a square matrix");
    let norm = m.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m / 2f64.powi(squarings as i32);

    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=TERMS {
        term = &term * &scaled / (k as f64);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}
