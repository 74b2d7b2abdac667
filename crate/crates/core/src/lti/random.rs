use nalgebra::{DMatrix, DVector, RowDVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::state_space::{DiscreteStateSpace, SampleTime};
use crate::error::{Error, Result};

/// Largest pole magnitude used when sampling.
pub const POLE_RADIUS: f64 = 0.95;
/// Zeros must satisfy `|z| < 1 - MIN_PHASE_MARGIN`.
pub const MIN_PHASE_MARGIN: f64 = 1e-8;
pub const DEFAULT_SAMPLING_BUDGET: usize = 10_000;

/// The three acceptance predicates for a sampled plant.
pub fn is_admissible(sys: &DiscreteStateSpace) -> bool {
    let cb = sys.first_markov(0);
    let scale = sys.c().norm() * sys.input_column(0).norm();
    if cb.abs() <= 1e-3 * scale {
        return false;
    }
    if sys.spectral_radius() >= 1.0 || !sys.is_controllable(0) {
        return false;
    }
    match sys.transmission_zeros(0) {
        Ok(zeros) => zeros.iter().all(|z| z.norm() < 1.0 - MIN_PHASE_MARGIN),
        Err(_) => false,
    }
}

fn sample_candidate(order: usize, rng: &mut ChaCha8Rng) -> Result<DiscreteStateSpace> {
    // real block-diagonal spectrum, eigenvalues uniform in the disk
    let mut blocks = DMatrix::zeros(order, order);
    let mut i = 0;
    while i < order {
        if order - i >= 2 && rng.random_bool(0.5) {
            let radius = POLE_RADIUS * rng.random::<f64>().sqrt();
            let angle = rng.random_range(0.0..std::f64::consts::PI);
            let (re, im) = (radius * angle.cos(), radius * angle.sin());
            blocks[(i, i)] = re;
            blocks[(i, i + 1)] = im;
            blocks[(i + 1, i)] = -im;
            blocks[(i + 1, i + 1)] = re;
            i += 2;
        } else {
            blocks[(i, i)] = rng.random_range(-POLE_RADIUS..POLE_RADIUS);
            i += 1;
        }
    }
    let t = DMatrix::from_fn(order, order, |_, _| rng.sample::<f64, _>(StandardNormal));
    let t_inv = t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular similarity transform".into()))?;
    let a = &t * blocks * t_inv;
    let b = DVector::from_fn(order, |_, _| rng.sample::<f64, _>(StandardNormal));
    let c = RowDVector::from_fn(order, |_, _| rng.sample::<f64, _>(StandardNormal));
    DiscreteStateSpace::siso(a, b, c, 0.0, SampleTime::Abstract)
}

/// Stable, controllable, minimum-phase random plant with `CB != 0`,
/// deterministic in `seed`.
pub fn random_system(order: usize, seed: u64) -> Result<DiscreteStateSpace> {
    random_system_with_budget(order, seed, DEFAULT_SAMPLING_BUDGET)
}

pub fn random_system_with_budget(
    order: usize,
    seed: u64,
    budget: usize,
) -> Result<DiscreteStateSpace> {
    if order == 0 {
        return Err(Error::InvalidArgument(
            "system order must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        match sample_candidate(order, &mut rng) {
            Ok(sys) if is_admissible(&sys) => return Ok(sys),
            _ => continue,
        }
    }
    Err(Error::SamplingBudget(budget))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = random_system(4, 1).unwrap();
        let b = random_system(4, 1).unwrap();
        assert_eq!(a, b);
        let c = random_system(4, 2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn first_order_case() {
        for seed in 0..20 {
            let sys = random_system(1, seed).unwrap();
            assert!(sys.a()[(0, 0)].abs() < 1.0);
            assert!(sys.first_markov(0) != 0.0);
            assert!(sys.transmission_zeros(0).unwrap().is_empty());
        }
    }

    #[test]
    fn zero_budget_fails() {
        assert!(matches!(
            random_system_with_budget(4, 0, 0),
            Err(Error::SamplingBudget(0))
        ));
    }
}
