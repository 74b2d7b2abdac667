//! Reference trajectories, persistently exciting inputs, output disturbances
//! and SNR scaling. Every generator takes an explicit seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::behave::hankel;
use crate::error::{Error, Result};
use crate::linalg::numerical_rank;

/// Redraws allowed before `gen_pe_input` gives up.
pub const PE_REDRAW_LIMIT: usize = 64;

/// SplitMix64 finaliser over `base` and `index`; used to derive per-trial and
/// per-system seeds from one master seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Disturbance family, without parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DisturbanceKind {
    None,
    Uniform,
    Sine,
    Gaussian,
}

impl DisturbanceKind {
    pub const ALL: [DisturbanceKind; 4] = [
        DisturbanceKind::None,
        DisturbanceKind::Uniform,
        DisturbanceKind::Sine,
        DisturbanceKind::Gaussian,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DisturbanceKind::None => "none",
            DisturbanceKind::Uniform => "uniform",
            DisturbanceKind::Sine => "sine",
            DisturbanceKind::Gaussian => "gaussian",
        }
    }
}

/// Additive output disturbance model.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DisturbanceSpec {
    #[default]
    None,
    /// i.i.d. uniform on `[-bound, bound]`.
    Uniform { bound: f64 },
    /// `bound * sin(omega * k * ts + phase)` with a random phase.
    Sine {
        bound: f64,
        omega: f64,
        #[serde(default = "unit_step")]
        ts: f64,
        /// Keep one phase for all trials instead of redrawing it per trial.
        #[serde(default)]
        fixed_phase: bool,
    },
    /// i.i.d. `N(0, sigma^2)`.
    Gaussian { sigma: f64 },
}

fn unit_step() -> f64 {
    1.0
}

impl DisturbanceSpec {
    /// `bound` feeds the uniform and sine models, `sigma` the Gaussian one.
    pub fn from_kind(
        kind: DisturbanceKind,
        bound: f64,
        sigma: f64,
        omega: f64,
        ts: f64,
        fixed_phase: bool,
    ) -> Self {
        match kind {
            DisturbanceKind::None => DisturbanceSpec::None,
            DisturbanceKind::Uniform => DisturbanceSpec::Uniform { bound },
            DisturbanceKind::Sine => DisturbanceSpec::Sine {
                bound,
                omega,
                ts,
                fixed_phase,
            },
            DisturbanceKind::Gaussian => DisturbanceSpec::Gaussian { sigma },
        }
    }

    pub fn kind(&self) -> DisturbanceKind {
        match self {
            DisturbanceSpec::None => DisturbanceKind::None,
            DisturbanceSpec::Uniform { .. } => DisturbanceKind::Uniform,
            DisturbanceSpec::Sine { .. } => DisturbanceKind::Sine,
            DisturbanceSpec::Gaussian { .. } => DisturbanceKind::Gaussian,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DisturbanceSpec::None => true,
            DisturbanceSpec::Uniform { bound } => bound >= 0.0 && bound.is_finite(),
            DisturbanceSpec::Sine {
                bound, omega, ts, ..
            } => bound >= 0.0 && bound.is_finite() && omega.is_finite() && ts > 0.0,
            DisturbanceSpec::Gaussian { sigma } => sigma >= 0.0 && sigma.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid disturbance parameters: {self:?}"
            )))
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind().name()
    }

    /// Deterministic bound on `|d(k)|`; the Gaussian model has none.
    pub fn amplitude_bound(&self) -> Option<f64> {
        match *self {
            DisturbanceSpec::None => Some(0.0),
            DisturbanceSpec::Uniform { bound } | DisturbanceSpec::Sine { bound, .. } => Some(bound),
            DisturbanceSpec::Gaussian { .. } => None,
        }
    }

    /// One realization of `length` samples.
    pub fn generate(&self, length: usize, seed: u64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        match *self {
            DisturbanceSpec::None => vec![0.0; length],
            DisturbanceSpec::Uniform { bound } => {
                if bound == 0.0 {
                    return vec![0.0; length];
                }
                (0..length)
                    .map(|_| rng.random_range(-bound..=bound))
                    .collect()
            }
            DisturbanceSpec::Sine {
                bound, omega, ts, ..
            } => {
                let phase = rng.random_range(0.0..std::f64::consts::TAU);
                (0..length)
                    .map(|k| bound * (omega * k as f64 * ts + phase).sin())
                    .collect()
            }
            DisturbanceSpec::Gaussian { sigma } => {
                let normal =
                    Normal::new(0.0, sigma).expect("sigma validated as finite and nonnegative");
                (0..length).map(|_| normal.sample(&mut rng)).collect()
            }
        }
    }

    /// Realization for online trial `trial`: fresh per trial, except that a
    /// fixed-phase sine reuses the phase drawn from `seed`.
    pub fn generate_trial(&self, length: usize, seed: u64, trial: usize) -> Vec<f64> {
        match self {
            DisturbanceSpec::Sine {
                fixed_phase: true, ..
            } => self.generate(length, seed),
            _ => self.generate(length, derive_seed(seed, trial as u64)),
        }
    }
}

/// How a reference trajectory is produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ReferenceSpec {
    /// Each element uniform on `[lo, hi]`.
    Uniform {
        lo: f64,
        hi: f64,
    },
    Constant {
        value: f64,
    },
    Custom {
        values: Vec<f64>,
    },
}

impl ReferenceSpec {
    pub fn generate(&self, length: usize, seed: u64) -> Result<Vec<f64>> {
        match self {
            ReferenceSpec::Uniform { lo, hi } => {
                if !(lo <= hi) {
                    return Err(Error::InvalidArgument(format!(
                        "reference range [{lo}, {hi}] is empty"
                    )));
                }
                let mut rng = rng_from_seed(seed);
                Ok((0..length)
                    .map(|_| {
                        if lo == hi {
                            *lo
                        } else {
                            rng.random_range(*lo..=*hi)
                        }
                    })
                    .collect())
            }
            ReferenceSpec::Constant { value } => Ok(vec![*value; length]),
            ReferenceSpec::Custom { values } => {
                if values.len() != length {
                    return Err(Error::Dimension(format!(
                        "custom reference has {} samples, horizon is {length}",
                        values.len()
                    )));
                }
                Ok(values.clone())
            }
        }
    }
}

/// True iff the `order`-row Hankel matrix of `u` has full row rank.
pub fn pe_check(u: &[f64], order: usize) -> bool {
    if order == 0 || u.len() < order || u.len() - order + 1 < order {
        return false;
    }
    match hankel(u, order) {
        Ok(h) => numerical_rank(&h) == order,
        Err(_) => false,
    }
}

/// Offline input `u(0..=t)` (length `t + 1`), i.i.d. uniform on
/// `[-amplitude, amplitude]`, persistently exciting of order `k + n`.
pub fn gen_pe_input(t: usize, k: usize, n: usize, seed: u64, amplitude: f64) -> Result<Vec<f64>> {
    let order = k + n;
    if t + 1 < k || t + 2 < k + order {
        return Err(Error::InsufficientData(format!(
            "T = {t} is too short for excitation of order {order} (need T - K + 1 >= K + n)"
        )));
    }
    if !(amplitude > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "input amplitude must be positive, got {amplitude}"
        )));
    }
    for attempt in 0..PE_REDRAW_LIMIT {
        let mut rng = rng_from_seed(derive_seed(seed, attempt as u64));
        let u: Vec<f64> = (0..=t)
            .map(|_| rng.random_range(-amplitude..=amplitude))
            .collect();
        if pe_check(&u, order) {
            return Ok(u);
        }
    }
    Err(Error::NotPersistentlyExciting(format!(
        "no draw excited order {order}"
    )))
}

/// `alpha * d` with `10 log10(||y||^2 / ||alpha d||^2) = target_db`.
pub fn scale_to_snr(y: &[f64], d: &[f64], target_db: f64) -> Result<Vec<f64>> {
    let ey: f64 = y.iter().map(|v| v * v).sum();
    let ed: f64 = d.iter().map(|v| v * v).sum();
    if ey == 0.0 {
        return Err(Error::ZeroEnergy("clean signal"));
    }
    if ed == 0.0 {
        return Err(Error::ZeroEnergy("disturbance"));
    }
    let alpha = (ey / (ed * 10f64.powf(target_db / 10.0))).sqrt();
    Ok(d.iter().map(|v| alpha * v).collect())
}

/// `10 log10(||y||^2 / ||d||^2)`.
pub fn snr_db(y: &[f64], d: &[f64]) -> f64 {
    let ey: f64 = y.iter().map(|v| v * v).sum();
    let ed: f64 = d.iter().map(|v| v * v).sum();
    10.0 * (ey / ed).log10()
}
