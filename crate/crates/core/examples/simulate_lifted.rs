//! Realise the benchmark transfer function, simulate it, and check the
//! trial-domain map `y = G u + c` against the time-domain recursion.

use ilc_forge::bench::toy_system;
use ilc_forge::lti::{build_lifted, simulate};
use nalgebra::DVector;

fn main() -> ilc_forge::Result<()> {
    let sys = toy_system()?;
    let n = 20;
    let x0 = DVector::from_vec(vec![0.5, -0.2, 0.1, 0.0]);
    let lifted = build_lifted(&sys, &x0, n)?;

    let u: Vec<f64> = (0..n).map(|k| (0.3 * k as f64).sin()).collect();
    let y_sim = simulate(&sys, &x0, &u, None)?;
    let y_lift = lifted.output(&DVector::from_vec(u));

    let gap = y_sim
        .iter()
        .zip(y_lift.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!(
        "order {}, spectral radius {:.4}",
        sys.order(),
        sys.spectral_radius()
    );
    println!("CB = {:.4}", sys.first_markov(0));
    println!(
        "L = {:.4}, xi = {:.3e}",
        lifted.lipschitz(),
        lifted.strong_convexity()
    );
    println!("max |y_sim - (G u + c)| = {gap:.3e}");
    for (k, y) in y_sim.iter().take(5).enumerate() {
        println!("k={k:2}  y={y:+.6}");
    }
    Ok(())
}
