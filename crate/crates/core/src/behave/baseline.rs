use nalgebra::{DMatrix, DVector};

use super::data::OfflineData;
use crate::error::{Error, Result};
use crate::linalg::{least_squares, lower_toeplitz};

/// Regression horizon used when none is given: `max(N, (T + 1) / 6)`.
pub fn default_fir_horizon(t: usize, horizon: usize) -> usize {
    horizon.max((t + 1) / 6)
}

/// Lower-triangular Toeplitz estimate from least-squares Markov parameters.
///
/// Fits `y(k) = sum_{i < H} m_i u(k - 1 - i)` over `k >= H` with optional
/// ridge weight, then keeps `m_0 .. m_{N-1}`. Taking `H` well past `N` lets the
/// truncated impulse response decay so the fit stays exact on clean data.
pub fn baseline_parametric(
    data: &OfflineData,
    horizon: usize,
    ridge: f64,
    fir_horizon: Option<usize>,
) -> Result<DMatrix<f64>> {
    let t = data.len_t();
    let h = fir_horizon.unwrap_or_else(|| default_fir_horizon(t, horizon));
    if h < horizon || horizon == 0 {
        return Err(Error::InvalidArgument(format!(
            "FIR horizon {h} must cover N = {horizon} > 0"
        )));
    }
    if !(ridge >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ridge must be nonnegative, got {ridge}"
        )));
    }
    if t < h || t + 1 - h <= h {
        return Err(Error::InsufficientData(format!(
            "{} regression rows for {h} unknowns",
            (t + 1).saturating_sub(h)
        )));
    }
    let (u, y) = (data.u(), data.y());
    let rows = t + 1 - h;
    let a = DMatrix::from_fn(rows, h, |r, i| u[r + h - 1 - i]);
    let b = DVector::from_fn(rows, |r, _| y[r + h]);
    let m = least_squares(&a, &b, ridge)?;
    Ok(lower_toeplitz(&m.as_slice()[..horizon]))
}
