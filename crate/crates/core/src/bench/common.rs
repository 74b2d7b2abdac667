use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::config::{ExperimentConfig, Repr};
use crate::behave::{baseline_parametric, identify, OfflineData};
use crate::error::Result;
use crate::signals::{derive_seed, rng_from_seed};

// stream indices for seeds derived from one experiment seed
pub(crate) const OFFLINE_INPUT: u64 = 1;
pub(crate) const OFFLINE_STATE: u64 = 2;
pub(crate) const OFFLINE_NOISE: u64 = 3;
pub(crate) const REFERENCE: u64 = 4;
pub(crate) const ONLINE_STATE: u64 = 5;
pub(crate) const ONLINE_NOISE: u64 = 6;
pub(crate) const PROBE: u64 = 7;
pub(crate) const SYSTEM: u64 = 8;
pub(crate) const BOX: u64 = 9;

pub(crate) const SEED_STREAMS: [(&str, u64); 9] = [
    ("offline_input", OFFLINE_INPUT),
    ("offline_state", OFFLINE_STATE),
    ("offline_noise", OFFLINE_NOISE),
    ("reference", REFERENCE),
    ("online_state", ONLINE_STATE),
    ("online_noise", ONLINE_NOISE),
    ("probe", PROBE),
    ("system", SYSTEM),
    ("box", BOX),
];

pub(crate) fn uniform_vector(len: usize, lo: f64, hi: f64, seed: u64) -> DVector<f64> {
    let mut rng = rng_from_seed(seed);
    DVector::from_fn(len, |_, _| {
        if lo == hi {
            lo
        } else {
            rng.random_range(lo..=hi)
        }
    })
}

pub(crate) fn stream(seed: u64, index: u64) -> u64 {
    derive_seed(seed, index)
}

/// Lifted-map estimate from offline data.
pub(crate) fn estimate(
    data: &OfflineData,
    cfg: &ExperimentConfig,
    repr: Repr,
) -> Result<DMatrix<f64>> {
    match repr {
        Repr::Dd => Ok(identify(data, cfg.t_ini, cfg.horizon, Some(cfg.order))?
            .g()
            .clone()),
        Repr::Si => baseline_parametric(data, cfg.horizon, cfg.ridge, cfg.fir_horizon),
    }
}

/// Mean of `values[range]`, clipped to what exists.
pub(crate) fn window_mean(values: &[f64], first: usize, last: usize) -> f64 {
    let last = last.min(values.len().saturating_sub(1));
    if first > last {
        return f64::NAN;
    }
    values[first..=last].iter().sum::<f64>() / (last - first + 1) as f64
}
