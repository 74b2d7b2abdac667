//! Small dense linear-algebra helpers shared by the numerical modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative cutoff factor used for every rank and pseudoinverse decision:
/// singular values at or below `sigma_max * max(rows, cols) * eps * 64` count as zero.
pub const RANK_TOL_FACTOR: f64 = 64.0;

pub fn rank_tolerance(sigma_max: f64, rows: usize, cols: usize) -> f64 {
    sigma_max * rows.max(cols) as f64 * f64::EPSILON * RANK_TOL_FACTOR
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let s = singular_values(m);
    match s.first() {
        None => 0,
        Some(&smax) => {
            let tol = rank_tolerance(smax, m.nrows(), m.ncols());
            s.iter().filter(|&&v| v > tol).count()
        }
    }
}

/// Moore-Penrose pseudoinverse through the SVD, using [`rank_tolerance`] as cutoff.
pub fn pinv(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(DMatrix::zeros(cols, rows));
    }
    let svd = m.clone().svd(true, true);
    let u = svd
        .u
        .as_ref()
        .ok_or_else(|| Error::Numerical("SVD did not return U".into()))?;
    let v_t = svd
        .v_t
        .as_ref()
        .ok_or_else(|| Error::Numerical("SVD did not return V^T".into()))?;
    let smax = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    if !smax.is_finite() {
        return Err(Error::Numerical(
            "non-finite singular value in pseudoinverse".into(),
        ));
    }
    if smax == 0.0 {
        return Err(Error::Numerical("pseudoinverse of a zero matrix".into()));
    }
    let tol = rank_tolerance(smax, rows, cols);
    let mut out = DMatrix::zeros(cols, rows);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > tol {
            // out += v_k * u_k^T / s
            let vk = v_t.row(k).transpose();
            let uk = u.column(k);
            out.ger(1.0 / s, &vk, &uk, 1.0);
        }
    }
    Ok(out)
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Extreme eigenvalues (min, max) of `M^T M`, computed as squared extreme singular values.
pub fn gram_extreme_eigenvalues(m: &DMatrix<f64>) -> (f64, f64) {
    let s = singular_values(m);
    let max = s.first().copied().unwrap_or(0.0);
    // A tall matrix has ncols singular values; a wide one leaves M^T M singular.
    let min = if m.nrows() >= m.ncols() {
        s.last().copied().unwrap_or(0.0)
    } else {
        0.0
    };
    (min * min, max * max)
}

/// Least-squares solve `min ||A x - b||` via the SVD pseudoinverse, or a ridge
/// normal-equation solve `(A^T A + ridge I) x = A^T b` when `ridge > 0`.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>, ridge: f64) -> Result<DVector<f64>> {
    if a.nrows() != b.len() {
        return Err(Error::Dimension(format!(
            "least squares: {} rows vs rhs length {}",
            a.nrows(),
            b.len()
        )));
    }
    if ridge > 0.0 {
        let mut normal = a.tr_mul(a);
        for i in 0..normal.nrows() {
            normal[(i, i)] += ridge;
        }
        let rhs = a.tr_mul(b);
        let chol = normal.cholesky().ok_or_else(|| {
            Error::Numerical("ridge normal equations not positive definite".into())
        })?;
        Ok(chol.solve(&rhs))
    } else {
        Ok(pinv(a)? * b)
    }
}

/// Euclidean norm of a slice.
pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn energy(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Zeroes every strictly-upper entry.
pub fn lower_triangular_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for j in 0..out.ncols() {
        for i in 0..j.min(out.nrows()) {
            out[(i, j)] = 0.0;
        }
    }
    out
}

/// Lower-triangular Toeplitz matrix whose first column is `markov`.
pub fn lower_toeplitz(markov: &[f64]) -> DMatrix<f64> {
    let n = markov.len();
    DMatrix::from_fn(n, n, |i, j| if i >= j { markov[i - j] } else { 0.0 })
}
