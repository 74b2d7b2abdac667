use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::common::*;
use super::config::{ExperimentConfig, Repr, Scenario};
use super::toy::{compare, offline_dataset, online_runs, probe_input, true_map};
use crate::error::{Error, Result};
use crate::ilc::{optimal_input, PlantOracle, Variant};
use crate::lti::{build_lifted, random_system, BoxConstraint};
use crate::signals::derive_seed;

/// Trials averaged by each stage indicator.
pub const STAGE_LENGTH: usize = 50;

/// Mean `||eps_j||` over trials `1..=50` and over the last 50 trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StageStats {
    pub early: f64,
    pub final_stage: f64,
}

impl StageStats {
    pub fn from_eps(eps: &[f64]) -> Self {
        let m = eps.len().saturating_sub(1);
        Self {
            early: window_mean(eps, 1, STAGE_LENGTH),
            final_stage: window_mean(eps, (m + 1).saturating_sub(STAGE_LENGTH).max(1), m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Percentiles {
    pub p0: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p100: f64,
}

impl Percentiles {
    /// Linear interpolation between order statistics.
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| -> f64 {
            if v.is_empty() {
                return f64::NAN;
            }
            let pos = p * (v.len() - 1) as f64;
            let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Self {
            p0: q(0.0),
            p25: q(0.25),
            p50: q(0.5),
            p75: q(0.75),
            p100: q(1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodStages {
    pub variant: Variant,
    pub repr: Repr,
    pub stats: StageStats,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystemRecord {
    pub index: usize,
    pub dd_error: f64,
    pub si_error: f64,
    pub methods: Vec<MethodStages>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchFailure {
    pub index: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageSummary {
    pub variant: Variant,
    pub repr: Repr,
    pub early: Percentiles,
    pub final_stage: Percentiles,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchReport {
    pub records: Vec<SystemRecord>,
    pub failures: Vec<BatchFailure>,
    pub summary: Vec<StageSummary>,
    pub mean_dd_error: f64,
    pub mean_si_error: f64,
}

impl BatchReport {
    pub fn stage(&self, variant: Variant, repr: Repr) -> Option<&StageSummary> {
        self.summary
            .iter()
            .find(|s| s.variant == variant && s.repr == repr)
    }
}

/// Seed of system `index` in a batch.
pub fn system_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, 1_000 + index as u64)
}

/// Box with lower bound in `[lo, lo/2]` and upper bound in `[hi/2, hi]`.
fn random_box(cfg: &ExperimentConfig, seed: u64) -> Result<BoxConstraint> {
    let ends = uniform_vector(2, 0.0, 1.0, stream(seed, BOX));
    let lower = cfg.box_lower * (1.0 - 0.5 * ends[0]);
    let upper = cfg.box_upper * (0.5 + 0.5 * ends[1]);
    BoxConstraint::new(lower, upper, cfg.horizon)
}

pub fn batch_system(cfg: &ExperimentConfig, index: usize) -> Result<SystemRecord> {
    let seed = system_seed(cfg.seed, index);
    let sys = random_system(cfg.order, stream(seed, SYSTEM))?;
    let g = true_map(&sys, cfg.horizon)?;
    let data = offline_dataset(&sys, cfg, cfg.disturbance, seed, 1.0)?;
    let probe = probe_input(cfg, seed);
    let (dd, si, dd_error, si_error) = compare(&data, cfg, &g, &probe)?;

    let bounds = random_box(cfg, seed)?;
    let reference = uniform_vector(cfg.horizon, cfg.ref_lo, cfg.ref_hi, stream(seed, REFERENCE));
    let x0 = uniform_vector(
        sys.order(),
        -cfg.x0_range,
        cfg.x0_range,
        stream(seed, ONLINE_STATE),
    );
    let u0 = DVector::from_element(cfg.horizon, bounds.center());
    let oracle = PlantOracle::new(
        sys,
        x0,
        reference,
        cfg.online_disturbance(),
        stream(seed, ONLINE_NOISE),
    )?;
    let estimates: Vec<(Repr, DMatrix<f64>)> = vec![(Repr::Dd, dd), (Repr::Si, si)];
    let methods = online_runs(&oracle, &estimates, &bounds, &u0, cfg)?
        .into_iter()
        .map(|c| MethodStages {
            variant: c.run.variant,
            repr: c.repr,
            stats: StageStats::from_eps(&c.run.eps_norms()),
        })
        .collect();
    Ok(SystemRecord {
        index,
        dd_error,
        si_error,
        methods,
    })
}

/// Optimal input of system `index`, for evaluation.
pub fn batch_optimal_input(cfg: &ExperimentConfig, index: usize) -> Result<DVector<f64>> {
    let seed = system_seed(cfg.seed, index);
    let sys = random_system(cfg.order, stream(seed, SYSTEM))?;
    let bounds = random_box(cfg, seed)?;
    let reference = uniform_vector(cfg.horizon, cfg.ref_lo, cfg.ref_hi, stream(seed, REFERENCE));
    let x0 = uniform_vector(
        sys.order(),
        -cfg.x0_range,
        cfg.x0_range,
        stream(seed, ONLINE_STATE),
    );
    optimal_input(&build_lifted(&sys, &x0, cfg.horizon)?, &reference, &bounds)
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

/// Systems run in parallel; results are folded in index order.
pub fn batch_experiment(cfg: &ExperimentConfig) -> Result<BatchReport> {
    if cfg.scenario != Scenario::Batch {
        return Err(Error::Config(format!(
            "scenario {} is not batch",
            cfg.scenario.name()
        )));
    }
    let outcomes: Vec<Result<SystemRecord>> = (0..cfg.systems)
        .into_par_iter()
        .map(|i| batch_system(cfg, i))
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(r) => records.push(r),
            Err(e) => failures.push(BatchFailure {
                index,
                message: e.to_string(),
            }),
        }
    }
    let mut summary = Vec::new();
    for repr in cfg.repr.reprs() {
        for &variant in &cfg.variants {
            let stats: Vec<StageStats> = records
                .iter()
                .flat_map(|r| r.methods.iter())
                .filter(|m| m.variant == variant && m.repr == repr)
                .map(|m| m.stats)
                .collect();
            summary.push(StageSummary {
                variant,
                repr,
                early: Percentiles::of(&stats.iter().map(|s| s.early).collect::<Vec<_>>()),
                final_stage: Percentiles::of(
                    &stats.iter().map(|s| s.final_stage).collect::<Vec<_>>(),
                ),
            });
        }
    }
    Ok(BatchReport {
        mean_dd_error: mean(records.iter().map(|r| r.dd_error)),
        mean_si_error: mean(records.iter().map(|r| r.si_error)),
        records,
        failures,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles_interpolate() {
        let p = Percentiles::of(&[4.0, 1.0, 3.0, 2.0, 5.0]);
        assert_eq!(
            (p.p0, p.p25, p.p50, p.p75, p.p100),
            (1.0, 2.0, 3.0, 4.0, 5.0)
        );
        assert_eq!(Percentiles::of(&[1.0, 2.0]).p50, 1.5);
    }

    #[test]
    fn stage_windows() {
        let eps: Vec<f64> = (0..=500).map(|j| j as f64).collect();
        let s = StageStats::from_eps(&eps);
        assert_eq!(s.early, 25.5);
        assert_eq!(s.final_stage, 475.5);
    }
}
