//! Classical, fast and hybrid updates on the toy plant with a learned map
//! and a sine output disturbance on every trial.

use ilc_forge::behave::identify;
use ilc_forge::bench::{offline_dataset, toy_system, ExperimentConfig, Scenario};
use ilc_forge::ilc::{optimal_input, run, IlcConfig, PlantOracle, Variant};
use ilc_forge::lti::{build_lifted, BoxConstraint};
use ilc_forge::signals::{DisturbanceKind, DisturbanceSpec};
use nalgebra::DVector;

fn main() -> ilc_forge::Result<()> {
    let cfg = ExperimentConfig::defaults(Scenario::Toy);
    let sys = toy_system()?;
    let n = cfg.horizon;

    let data = offline_dataset(&sys, &cfg, DisturbanceKind::Sine, 3, 1.0)?;
    let g_tilde = identify(&data, cfg.t_ini, n, Some(cfg.order))?.g().clone();

    let x0 = DVector::from_element(4, 0.5);
    let r = DVector::from_fn(n, |i, _| 8.0 * (0.4 * i as f64).sin());
    let bounds = BoxConstraint::new(-20.0, 20.0, n)?;
    let u_star = optimal_input(&build_lifted(&sys, &x0, n)?, &r, &bounds)?;

    let noise = DisturbanceSpec::Sine {
        bound: 3.0,
        omega: 100.0,
        ts: 1.0,
        fixed_phase: false,
    };
    let oracle = PlantOracle::new(sys, x0, r, noise, 99)?;

    for variant in Variant::ALL {
        let ilc = IlcConfig::new(variant, g_tilde.clone(), bounds, DVector::zeros(n))
            .with_trials(200)
            .with_window(cfg.window);
        let out = run(&oracle, &ilc)?;
        let eps = out.eps_norms();
        let last = out.final_record();
        println!(
            "{:>9}: |eps_1| {:8.4}  |eps_50| {:8.4}  |eps_200| {:8.4}  |u-u*| {:.4}  switch {:?}",
            variant.name(),
            eps[1],
            eps[50],
            eps[200],
            (&last.u - &u_star).norm(),
            out.switch_index
        );
    }
    Ok(())
}
