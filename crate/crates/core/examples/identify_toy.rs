//! Learn the lifted map from one offline trajectory, with and without output
//! disturbance, and compare against the least-squares Markov baseline.

use ilc_forge::behave::{baseline_parametric, identify, relative_error, OfflineData};
use ilc_forge::bench::toy_system;
use ilc_forge::lti::build_lifted;
use ilc_forge::signals::{gen_pe_input, scale_to_snr, DisturbanceSpec};
use nalgebra::DVector;

fn main() -> ilc_forge::Result<()> {
    let sys = toy_system()?;
    let (t, t_ini, n, order) = (1000, 4, 20, 4);
    let g = build_lifted(&sys, &DVector::zeros(4), n)?.g().clone();
    let probe = DVector::from_fn(n, |i, _| ((i * 7 % 11) as f64) - 5.0);

    let u = gen_pe_input(t, t_ini + n + 1, order, 11, 1.0)?;
    let x0 = DVector::from_vec(vec![0.3, -0.1, 0.2, 0.05]);
    let clean = OfflineData::collect(&sys, &x0, u.clone(), None)?;

    let spec = DisturbanceSpec::Sine {
        bound: 3.0,
        omega: 100.0,
        ts: 1.0,
        fixed_phase: false,
    };
    let d = scale_to_snr(clean.y(), &spec.generate(t + 1, 12), 10.0)?;
    let noisy = OfflineData::collect(&sys, &x0, u, Some(&d))?;

    for (label, data) in [("clean", &clean), ("sine 10 dB", &noisy)] {
        let dd = identify(data, t_ini, n, Some(order))?;
        let si = baseline_parametric(data, n, 0.0, None)?;
        println!(
            "{label:>11}: dd {:.3e}  si {:.3e}",
            relative_error(&g, dd.g(), &probe)?,
            relative_error(&g, &si, &probe)?
        );
    }

    // the same representation also predicts a full future trajectory
    let rep = identify(&clean, t_ini, n, None)?;
    let (up, yp) = (&clean.u()[..t_ini], &clean.y()[1..=t_ini]);
    let uf = &clean.u()[t_ini..t_ini + n];
    let pred = rep.predict(up, yp, uf)?;
    let truth = &clean.y()[t_ini + 1..=t_ini + n];
    let err = pred
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("max prediction error on clean data: {err:.3e}");
    Ok(())
}
