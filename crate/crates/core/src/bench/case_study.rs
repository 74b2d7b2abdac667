use nalgebra::{DMatrix, DVector};

use super::common::*;
use super::config::{ExperimentConfig, Repr, Scenario};
use super::plants::motion_closed_loop;
use super::toy::{compare, offline_dataset, online_runs, probe_input, true_map, Curve, RelErrRow};
use crate::error::{Error, Result};
use crate::ilc::{optimal_input, Measurement, PlantOracle, TrialOracle};
use crate::lti::{build_lifted_with_exogenous, DiscreteStateSpace};

/// The loop under feedback alone, with the feedforward channel at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackRun {
    pub e_norms: Vec<f64>,
    pub eps_norms: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct CaseStudyReport {
    pub system: DiscreteStateSpace,
    pub lag: Option<usize>,
    pub table: Vec<RelErrRow>,
    pub curves: Vec<Curve>,
    pub feedback: FeedbackRun,
    pub reference: DVector<f64>,
    pub x0: DVector<f64>,
    pub u_star: DVector<f64>,
}

/// State at rest at output `position` while `u = u_level` and the
/// reference input is held at the level that produces it.
pub fn equilibrium_state(
    sys: &DiscreteStateSpace,
    u_level: f64,
    position: f64,
) -> Result<DVector<f64>> {
    let n = sys.order();
    let lu = (DMatrix::identity(n, n) - sys.a()).lu();
    let singular = || Error::Numerical("closed loop has a pole at z = 1".into());
    let xu = lu
        .solve(&(sys.input_column(0) * u_level))
        .ok_or_else(singular)?;
    let xr = lu.solve(&sys.input_column(1)).ok_or_else(singular)?;
    let gain = sys.c().dot(&xr.transpose());
    if gain == 0.0 {
        return Err(Error::Numerical(
            "reference has no static effect on the output".into(),
        ));
    }
    let r_level = (position - sys.c().dot(&xu.transpose())) / gain;
    Ok(xu + xr * r_level)
}

pub fn case_study(cfg: &ExperimentConfig) -> Result<CaseStudyReport> {
    if cfg.scenario != Scenario::CaseStudy {
        return Err(Error::Config(format!(
            "scenario {} is not case-study",
            cfg.scenario.name()
        )));
    }
    let system = motion_closed_loop(cfg.scenario.sample_time())?;
    let g = true_map(&system, cfg.horizon)?;
    // offline data: loop closed, reference held at zero
    let data = offline_dataset(&system, cfg, cfg.disturbance, cfg.seed, 0.0)?;
    let probe = probe_input(cfg, cfg.seed);
    let (dd, si, e_dd, e_si) = compare(&data, cfg, &g, &probe)?;
    let table = vec![RelErrRow {
        disturbance: cfg.disturbance,
        dd: e_dd,
        si: e_si,
    }];

    let bounds = cfg.fixed_box()?;
    let u_level = cfg.u0.unwrap_or(bounds.center());
    let reference = uniform_vector(
        cfg.horizon,
        cfg.ref_lo,
        cfg.ref_hi,
        stream(cfg.seed, REFERENCE),
    );
    let position = uniform_vector(1, cfg.ref_lo, cfg.ref_hi, stream(cfg.seed, ONLINE_STATE))[0];
    let x0 = equilibrium_state(&system, u_level, position)?;
    // the reference sample fed at k is the target for y(k + 1)
    let exogenous = DMatrix::from_column_slice(cfg.horizon, 1, reference.as_slice());
    let lifted = build_lifted_with_exogenous(&system, &x0, cfg.horizon, &exogenous)?;
    let u_star = optimal_input(&lifted, &reference, &bounds)?;
    let oracle = PlantOracle::with_exogenous(
        system.clone(),
        x0.clone(),
        reference.clone(),
        exogenous,
        cfg.online_disturbance(),
        stream(cfg.seed, ONLINE_NOISE),
    )?;
    let u0 = DVector::from_element(cfg.horizon, u_level);
    let curves = online_runs(
        &oracle,
        &[(Repr::Dd, dd), (Repr::Si, si)],
        &bounds,
        &u0,
        cfg,
    )?;

    let zero = DVector::zeros(cfg.horizon);
    let measured: Vec<Measurement> = (0..=cfg.trials)
        .map(|j| oracle.measure(j, &zero))
        .collect::<Result<_>>()?;
    let feedback = FeedbackRun {
        e_norms: measured.iter().map(|m| m.inexact.norm()).collect(),
        eps_norms: measured.iter().map(|m| m.exact.norm()).collect(),
    };
    Ok(CaseStudyReport {
        lag: system.lag(),
        system,
        table,
        curves,
        feedback,
        reference,
        x0,
        u_star,
    })
}
