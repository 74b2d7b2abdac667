//! Oracle error bounds and convergence envelopes for a random plant.

use ilc_forge::ilc::{
    envelopes, jbar, optimal_input, oracle_bounds, run, IlcConfig, LiftedOracle, Variant,
};
use ilc_forge::lti::{build_lifted, random_system, BoxConstraint};
use ilc_forge::signals::DisturbanceSpec;
use nalgebra::DVector;

fn main() -> ilc_forge::Result<()> {
    let n = 8;
    let sys = random_system(4, 21)?;
    let lifted = build_lifted(&sys, &DVector::zeros(4), n)?;
    let r = DVector::from_fn(n, |i, _| (i as f64 * 0.7).cos());
    let u_free = lifted.unconstrained_optimum(&r)?;
    let bound = 1.5 * u_free.amax();
    let bx = BoxConstraint::new(-bound, bound, n)?;
    let u_star = optimal_input(&lifted, &r, &bx)?;

    // a slightly wrong map plus a bounded disturbance
    let g_tilde = lifted.g() * 1.02;
    let dbar = 0.01;
    let jb = jbar(lifted.g(), lifted.c(), &r, &bx);
    let b = oracle_bounds(lifted.g(), &g_tilde, dbar, &bx, jb)?;
    println!("Jbar {:.4} ({:?})", jb.value, jb.kind);
    println!(
        "delta1 {:.4e}  delta2 {:.4e}  delta {:.4e}  D {:.4}",
        b.delta1, b.delta2, b.delta, b.diameter
    );

    let exact = oracle_bounds(lifted.g(), lifted.g(), 0.0, &bx, jb)?;
    let oracle = LiftedOracle::new(lifted.clone(), r.clone(), DisturbanceSpec::None, 0)?;
    for variant in [Variant::Classical, Variant::Fast] {
        let cfg =
            IlcConfig::new(variant, lifted.g().clone(), bx, DVector::zeros(n)).with_trials(300);
        let out = run(&oracle, &cfg)?;
        let rep = envelopes(&out, &lifted, &r, &u_star, &exact, 1e-6);
        let last = rep.rows.last().unwrap();
        println!(
            "{:>9}: final gap {:.3e}, envelope {:.3e}, violations {}",
            variant.name(),
            last.gap,
            last.envelope.unwrap_or(f64::NAN),
            rep.violations()
        );
    }
    Ok(())
}
