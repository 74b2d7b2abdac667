use ilc_forge::bench::{motion_controller, motion_plant, toy_system};
use ilc_forge::lti::{
    build_lifted, c2d_zoh, feedback_loop, poly_eval, random_system, simulate, ContinuousStateSpace,
    SampleTime, TransferFunction,
};
use ilc_forge::signals::{derive_seed, rng_from_seed};
use nalgebra::{Complex, DMatrix, DVector, RowDVector};
use rand::Rng;

fn rel(a: Complex<f64>, b: Complex<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn lifted_map_matches_simulation() {
    let mut rng = rng_from_seed(404);
    for i in 0..100u64 {
        let order = 1 + (i % 6) as usize;
        let sys = random_system(order, derive_seed(17, i)).unwrap();
        let n = rng.random_range(1..=30);
        let x0 = DVector::from_fn(order, |_, _| rng.random_range(-2.0..2.0));
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let lifted = build_lifted(&sys, &x0, n).unwrap();
        let y = simulate(&sys, &x0, &u, None).unwrap();
        let ly = lifted.output(&DVector::from_vec(u));
        let gap = y
            .iter()
            .zip(ly.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap <= 1e-9, "instance {i}: {gap:e}");
        for r in 0..n {
            for c in r + 1..n {
                assert_eq!(lifted.g()[(r, c)], 0.0);
            }
        }
    }
}

#[test]
fn zoh_matches_eigen_decomposition() {
    let mut rng = rng_from_seed(9);
    for _ in 0..20 {
        let n = rng.random_range(1..=5);
        let lambdas: Vec<f64> = (0..n)
            .map(|k| -0.5 - k as f64 - rng.random_range(0.0..0.4))
            .collect();
        let v = DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                2.0
            } else {
                rng.random_range(-0.5..0.5)
            }
        });
        let v_inv = v.clone().try_inverse().unwrap();
        let a = &v * DMatrix::from_diagonal(&DVector::from_vec(lambdas.clone())) * &v_inv;
        let b = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let c = RowDVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let ts = rng.random_range(0.01..0.5);
        let sys = ContinuousStateSpace::siso(a, b.clone(), c, 0.0).unwrap();
        let d = c2d_zoh(&sys, ts).unwrap();

        let ead = DVector::from_iterator(n, lambdas.iter().map(|l| (l * ts).exp()));
        let ebd = DVector::from_iterator(n, lambdas.iter().map(|l| ((l * ts).exp() - 1.0) / l));
        let ad = &v * DMatrix::from_diagonal(&ead) * &v_inv;
        let bd = &v * DMatrix::from_diagonal(&ebd) * &v_inv * &b;
        assert!((d.a() - ad).amax() <= 1e-9);
        assert!((d.input_column(0) - bd).amax() <= 1e-9);
        assert_eq!(d.sample_time(), SampleTime::Seconds(ts));
    }
}

#[test]
fn closed_loop_frequency_identity() {
    let plant_tf = TransferFunction::continuous(vec![2.0, 3.0], vec![1.0, 0.4, 5.0, 1.0]).unwrap();
    let ctrl_tf = TransferFunction::continuous(vec![4.0, 1.0], vec![1.0, 8.0]).unwrap();
    let pairs = [
        (
            plant_tf.to_continuous().unwrap(),
            ctrl_tf.to_continuous().unwrap(),
            plant_tf.clone(),
            ctrl_tf.clone(),
        ),
        (
            motion_plant().unwrap(),
            motion_controller().unwrap(),
            motion_plant_tf(),
            motion_controller_tf(),
        ),
    ];
    let mut rng = rng_from_seed(5);
    for (p, k, ptf, ktf) in pairs {
        let cl = feedback_loop(&p, &k).unwrap();
        for _ in 0..50 {
            let s = Complex::new(0.0, 10f64.powf(rng.random_range(-1.0..3.0)));
            let (pv, kv) = (ptf.eval(s), ktf.eval(s));
            let one = Complex::new(1.0, 0.0);
            assert!(rel(cl.freq_response(s, 0).unwrap(), pv / (one + pv * kv)) <= 1e-8);
            assert!(rel(cl.freq_response(s, 1).unwrap(), pv * kv / (one + pv * kv)) <= 1e-8);
        }
    }
}

fn motion_plant_tf() -> TransferFunction {
    let (wz, wp) = (88.5f64, 89.5f64);
    let num = vec![3500.0 / (wz * wz), 350.0 / wz, 3500.0];
    let den = vec![1.0 / (wp * wp), 0.1 / wp, 1.0, 0.0, 0.0];
    TransferFunction::continuous(num, den).unwrap()
}

fn motion_controller_tf() -> TransferFunction {
    TransferFunction::continuous(vec![10.0, 1019.0, 1900.0], vec![1.0, 201.15, 230.0]).unwrap()
}

#[test]
fn motion_loop_is_stable_and_tracks_steps() {
    let cl = feedback_loop(&motion_plant().unwrap(), &motion_controller().unwrap()).unwrap();
    assert!(cl.poles().iter().all(|p| p.re < 0.0));
    let d = c2d_zoh(&cl, 0.01).unwrap();
    let n = 2000;
    let mut inputs = DMatrix::zeros(n, 2);
    inputs.column_mut(1).fill(1.0);
    let y = ilc_forge::lti::simulate_inputs(&d, &DVector::zeros(d.order()), &inputs).unwrap();
    assert!((y[n - 1] - 1.0).abs() < 1e-3, "{}", y[n - 1]);
}

#[test]
fn toy_realization_matches_polynomials() {
    let sys = toy_system().unwrap();
    let num = [0.7836, 0.7732, 0.1936, 0.009937];
    let den = [1.0, 1.778, 0.9869, 0.2007, 0.0205];
    for k in 0..40 {
        let w = 0.05 + k as f64 * 0.075;
        let z = Complex::from_polar(1.0, w);
        let expected = poly_eval(&num, z) / poly_eval(&den, z);
        assert!(rel(sys.freq_response(z, 0).unwrap(), expected) <= 1e-10);
    }
}

#[test]
fn pole_zero_cancellation_keeps_unit_response() {
    let tf =
        TransferFunction::discrete(vec![1.0, 1.0], vec![1.0, 1.0], SampleTime::Abstract).unwrap();
    let sys = tf.to_discrete().unwrap();
    assert_eq!(sys.order(), 1);
    for k in 0..10 {
        let z = Complex::from_polar(0.7, 0.3 * k as f64);
        assert!(rel(sys.freq_response(z, 0).unwrap(), Complex::new(1.0, 0.0)) <= 1e-12);
    }
}

#[test]
fn random_system_predicates_hold() {
    for seed in 0..20u64 {
        let sys = random_system(4, seed).unwrap();
        assert!(sys.poles().iter().all(|p| p.norm() < 1.0));
        let cb = (sys.c() * sys.input_column(0))[0];
        assert!(cb.abs() > 1e-3 * sys.c().norm() * sys.input_column(0).norm());

        let mut ctrb = DMatrix::zeros(4, 4);
        let mut v = sys.input_column(0);
        for k in 0..4 {
            ctrb.set_column(k, &v);
            v = sys.a() * v;
        }
        let sv = ctrb.singular_values();
        assert!(sv.min() > 1e-10 * sv.max());

        // every reported zero makes the Rosenbrock matrix singular
        let zeros = sys.transmission_zeros(0).unwrap();
        assert_eq!(zeros.len(), 3);
        for z in zeros {
            assert!(z.norm() < 1.0);
            let mut ros = DMatrix::<Complex<f64>>::zeros(5, 5);
            for r in 0..4 {
                for c in 0..4 {
                    let id = if r == c { z } else { Complex::new(0.0, 0.0) };
                    ros[(r, c)] = id - Complex::new(sys.a()[(r, c)], 0.0);
                }
                ros[(r, 4)] = Complex::new(-sys.input_column(0)[r], 0.0);
                ros[(4, r)] = Complex::new(sys.c()[r], 0.0);
            }
            let sv = ros.singular_values();
            assert!(
                sv.min() <= 1e-8 * sv.max(),
                "zero {z} not a Rosenbrock root"
            );
        }
    }
}
