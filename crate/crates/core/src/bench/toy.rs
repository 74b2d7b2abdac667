use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::common::*;
use super::config::{ExperimentConfig, Repr, Scenario};
use super::plants::toy_system;
use crate::behave::{relative_error, OfflineData};
use crate::error::{Error, Result};
use crate::ilc::{optimal_input, run, IlcConfig, IlcRun, PlantOracle};
use crate::lti::{build_lifted_with_exogenous, BoxConstraint, DiscreteStateSpace};
use crate::signals::{derive_seed, gen_pe_input, scale_to_snr, DisturbanceKind};

/// Relative errors of both estimates under one disturbance class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelErrRow {
    pub disturbance: DisturbanceKind,
    pub dd: f64,
    pub si: f64,
}

/// One ILC run and the map it learned with.
#[derive(Clone, Debug)]
pub struct Curve {
    pub repr: Repr,
    pub run: IlcRun,
}

#[derive(Clone, Debug)]
pub struct ToyReport {
    pub table: Vec<RelErrRow>,
    pub curves: Vec<Curve>,
    pub reference: DVector<f64>,
    pub u_star: DVector<f64>,
}

/// Offline trajectory for `kind`; with an SNR target the disturbance is
/// rescaled against the clean output.
pub fn offline_dataset(
    sys: &DiscreteStateSpace,
    cfg: &ExperimentConfig,
    kind: DisturbanceKind,
    seed: u64,
    state_range: f64,
) -> Result<OfflineData> {
    let u = gen_pe_input(
        cfg.t,
        cfg.depth(),
        cfg.order,
        stream(seed, OFFLINE_INPUT),
        cfg.input_amplitude,
    )?;
    let x0 = uniform_vector(
        sys.order(),
        -state_range,
        state_range,
        stream(seed, OFFLINE_STATE),
    );
    if kind == DisturbanceKind::None {
        return OfflineData::collect(sys, &x0, u, None);
    }
    let spec = cfg.disturbance_spec(kind);
    let mut d = spec.generate(
        cfg.t + 1,
        derive_seed(stream(seed, OFFLINE_NOISE), kind as u64),
    );
    if let Some(db) = cfg.snr_db {
        let clean = OfflineData::collect(sys, &x0, u.clone(), None)?;
        d = scale_to_snr(clean.y(), &d, db)?;
    }
    OfflineData::collect(sys, &x0, u, Some(&d))
}

/// Both estimates and their relative errors against `g`.
pub(crate) fn compare(
    data: &OfflineData,
    cfg: &ExperimentConfig,
    g: &DMatrix<f64>,
    probe: &DVector<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>, f64, f64)> {
    let dd = estimate(data, cfg, Repr::Dd)?;
    let si = estimate(data, cfg, Repr::Si)?;
    let e_dd = relative_error(g, &dd, probe)?;
    let e_si = relative_error(g, &si, probe)?;
    Ok((dd, si, e_dd, e_si))
}

/// Markov-parameter map of channel 0.
pub(crate) fn true_map(sys: &DiscreteStateSpace, horizon: usize) -> Result<DMatrix<f64>> {
    let zero = DVector::zeros(sys.order());
    let exo = DMatrix::zeros(horizon, sys.inputs() - 1);
    Ok(build_lifted_with_exogenous(sys, &zero, horizon, &exo)?
        .g()
        .clone())
}

pub(crate) fn probe_input(cfg: &ExperimentConfig, seed: u64) -> DVector<f64> {
    uniform_vector(
        cfg.horizon,
        cfg.box_lower,
        cfg.box_upper,
        stream(seed, PROBE),
    )
}

/// Relative error table over every disturbance class.
pub fn toy_relative_errors(cfg: &ExperimentConfig) -> Result<Vec<RelErrRow>> {
    let sys = toy_system()?;
    let g = true_map(&sys, cfg.horizon)?;
    let probe = probe_input(cfg, cfg.seed);
    DisturbanceKind::ALL
        .iter()
        .map(|&kind| {
            let data = offline_dataset(&sys, cfg, kind, cfg.seed, 1.0)?;
            let (_, _, dd, si) = compare(&data, cfg, &g, &probe)?;
            Ok(RelErrRow {
                disturbance: kind,
                dd,
                si,
            })
        })
        .collect()
}

/// Runs every configured variant on every configured map.
#[allow(clippy::too_many_arguments)]
pub(crate) fn online_runs(
    oracle: &PlantOracle,
    estimates: &[(Repr, DMatrix<f64>)],
    bounds: &BoxConstraint,
    u0: &DVector<f64>,
    cfg: &ExperimentConfig,
) -> Result<Vec<Curve>> {
    let mut curves = Vec::new();
    for (repr, g_tilde) in estimates {
        if !cfg.repr.reprs().contains(repr) {
            continue;
        }
        for &variant in &cfg.variants {
            let ilc = IlcConfig::new(variant, g_tilde.clone(), *bounds, u0.clone())
                .with_trials(cfg.trials)
                .with_window(cfg.window)
                .with_safety_factor(cfg.safety_factor);
            curves.push(Curve {
                repr: *repr,
                run: run(oracle, &ilc)?,
            });
        }
    }
    Ok(curves)
}

pub fn toy_experiment(cfg: &ExperimentConfig) -> Result<ToyReport> {
    if cfg.scenario != Scenario::Toy {
        return Err(Error::Config(format!(
            "scenario {} is not toy",
            cfg.scenario.name()
        )));
    }
    let sys = toy_system()?;
    let g = true_map(&sys, cfg.horizon)?;
    let probe = probe_input(cfg, cfg.seed);
    let mut table = Vec::new();
    let mut estimates = Vec::new();
    for kind in DisturbanceKind::ALL {
        let data = offline_dataset(&sys, cfg, kind, cfg.seed, 1.0)?;
        let (dd, si, e_dd, e_si) = compare(&data, cfg, &g, &probe)?;
        table.push(RelErrRow {
            disturbance: kind,
            dd: e_dd,
            si: e_si,
        });
        if kind == cfg.disturbance {
            estimates = vec![(Repr::Dd, dd), (Repr::Si, si)];
        }
    }

    let reference = uniform_vector(
        cfg.horizon,
        cfg.ref_lo,
        cfg.ref_hi,
        stream(cfg.seed, REFERENCE),
    );
    let x0 = uniform_vector(
        sys.order(),
        -cfg.x0_range,
        cfg.x0_range,
        stream(cfg.seed, ONLINE_STATE),
    );
    let bounds = cfg.fixed_box()?;
    let u0 = DVector::from_element(cfg.horizon, cfg.u0.unwrap_or(bounds.center()));
    let lifted =
        build_lifted_with_exogenous(&sys, &x0, cfg.horizon, &DMatrix::zeros(cfg.horizon, 0))?;
    let u_star = optimal_input(&lifted, &reference, &bounds)?;
    let oracle = PlantOracle::new(
        sys,
        x0,
        reference.clone(),
        cfg.online_disturbance(),
        stream(cfg.seed, ONLINE_NOISE),
    )?;
    let curves = online_runs(&oracle, &estimates, &bounds, &u0, cfg)?;
    Ok(ToyReport {
        table,
        curves,
        reference,
        u_star,
    })
}
