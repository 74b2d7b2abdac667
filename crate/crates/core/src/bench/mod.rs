//! Experiment drivers: the fourth-order benchmark plant under each
//! disturbance class, a batch of random plants with stage statistics, and a
//! motion-stage case study with a feedback loop. Results go to CSV files plus
//! a manifest.

mod batch;
mod case_study;
mod common;
mod config;
mod emit;
mod plants;
mod toy;

pub use batch::{
    batch_experiment, batch_optimal_input, batch_system, system_seed, BatchFailure, BatchReport,
    MethodStages, Percentiles, StageStats, StageSummary, SystemRecord, STAGE_LENGTH,
};
pub use case_study::{case_study, equilibrium_state, CaseStudyReport, FeedbackRun};
pub use config::{ConfigFile, ExperimentConfig, Repr, ReprChoice, Scenario};
pub use emit::{emit_csv, Manifest, Report};
pub use plants::{motion_closed_loop, motion_controller, motion_plant, toy_system};
pub use toy::{offline_dataset, toy_experiment, toy_relative_errors, Curve, RelErrRow, ToyReport};

use crate::error::Result;

/// Runs the scenario named in `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    Ok(match cfg.scenario {
        Scenario::Toy => Report::Toy(toy_experiment(cfg)?),
        Scenario::Batch => Report::Batch(batch_experiment(cfg)?),
        Scenario::CaseStudy => Report::CaseStudy(case_study(cfg)?),
    })
}
