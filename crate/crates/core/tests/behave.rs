use ilc_forge::behave::{
    baseline_parametric, build_representation, causal_project, denoise, identify, partition,
    rank_condition, OfflineData,
};
use ilc_forge::bench::toy_system;
use ilc_forge::linalg::numerical_rank;
use ilc_forge::lti::{build_lifted, simulate, DiscreteStateSpace};
use ilc_forge::signals::{gen_pe_input, rng_from_seed};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

fn toy_data(t: usize, depth: usize, seed: u64, noise: f64) -> (DiscreteStateSpace, OfflineData) {
    let sys = toy_system().unwrap();
    let u = gen_pe_input(t, depth, 4, seed, 1.0).unwrap();
    let x0 = DVector::from_vec(vec![0.2, -0.4, 0.1, 0.3]);
    let d: Option<Vec<f64>> = (noise > 0.0).then(|| {
        let mut rng = rng_from_seed(seed + 1);
        (0..=t).map(|_| rng.random_range(-noise..=noise)).collect()
    });
    let data = OfflineData::collect(&sys, &x0, u, d.as_deref()).unwrap();
    (sys, data)
}

#[test]
fn exact_identity_on_clean_data() {
    for (seed, t_ini, n) in [(1, 4, 20), (2, 5, 12), (3, 8, 6)] {
        let (sys, data) = toy_data(600, t_ini + n + 1, seed, 0.0);
        let g = build_lifted(&sys, &DVector::zeros(4), n)
            .unwrap()
            .g()
            .clone();
        for order in [None, Some(4)] {
            let rep = identify(&data, t_ini, n, order).unwrap();
            let err = (rep.g() - &g).norm() / g.norm();
            assert!(err <= 1e-6, "T_ini {t_ini} N {n} order {order:?}: {err:e}");
        }
    }
}

#[test]
fn markov_baseline_exact_on_clean_toy_record() {
    let (sys, data) = toy_data(1000, 25, 1, 0.0);
    let g = build_lifted(&sys, &DVector::zeros(4), 20)
        .unwrap()
        .g()
        .clone();
    let si = baseline_parametric(&data, 20, 0.0, None).unwrap();
    assert!((&si - &g).norm() / g.norm() <= 1e-6);
}

#[test]
fn every_hankel_column_is_a_trajectory() {
    let (sys, data) = toy_data(200, 9, 4, 0.0);
    let (t_ini, n) = (3, 5);
    let blocks = partition(&data, t_ini, n).unwrap();
    let u = blocks.inputs();
    let y = blocks.outputs();
    // replay column j from the true state at time j
    let states = {
        let mut x = DVector::from_vec(vec![0.2, -0.4, 0.1, 0.3]);
        let mut xs = vec![x.clone()];
        for &uk in data.u() {
            x = sys.a() * &x + sys.input_column(0) * uk;
            xs.push(x.clone());
        }
        xs
    };
    for j in 0..blocks.columns() {
        let col_u: Vec<f64> = u.column(j).iter().copied().collect();
        let sim = simulate(&sys, &states[j], &col_u, None).unwrap();
        for (k, v) in sim.iter().enumerate() {
            assert!((v - y[(k, j)]).abs() <= 1e-9, "column {j} row {k}");
        }
    }
}

#[test]
fn prediction_on_held_out_trajectory() {
    let (sys, data) = toy_data(800, 4 + 15 + 1, 6, 0.0);
    let rep = identify(&data, 4, 15, Some(4)).unwrap();
    let mut rng = rng_from_seed(77);
    for _ in 0..5 {
        let x0 = DVector::from_fn(4, |_, _| rng.random_range(-3.0..3.0));
        let u: Vec<f64> = (0..19).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y = simulate(&sys, &x0, &u, None).unwrap();
        let pred = rep.predict(&u[..4], &y[..4], &u[4..]).unwrap();
        let truth = DVector::from_column_slice(&y[4..]);
        assert!((&pred - &truth).norm() / truth.norm() <= 1e-6);
    }
}

#[test]
fn denoised_rank_and_eckart_young() {
    let (_, data) = toy_data(400, 4 + 10 + 1, 8, 0.3);
    let blocks = partition(&data, 4, 10).unwrap();
    let k = blocks.depth();
    for n in [1, 2, 4, 6] {
        let d = denoise(&blocks, n).unwrap();
        assert_eq!(numerical_rank(&d.blocks.stacked()), k + n);
        assert_eq!(d.blocks.inputs(), blocks.inputs());

        // residual outside the input row space, and how much was removed from it
        let ut = blocks.inputs().transpose();
        let q1 = ut.qr().q();
        let yt = blocks.outputs().transpose();
        let inside = &q1 * q1.tr_mul(&yt);
        let d2 = &yt - &inside;
        let d2_bar = d.blocks.outputs().transpose() - &inside;
        let removed = (&d2 - &d2_bar).norm();
        let mut sv: Vec<f64> = d2.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        let discarded = sv[n..].iter().map(|s| s * s).sum::<f64>().sqrt();
        assert!(
            (removed - discarded).abs() <= 1e-9 * (1.0 + discarded),
            "n {n}: {removed} vs {discarded}"
        );
    }
    assert!(rank_condition(
        &partition(&toy_data(400, 15, 8, 0.0).1, 4, 10).unwrap(),
        4
    ));
}

#[test]
fn causal_projection_is_idempotent_with_zero_upper_triangle() {
    let mut rng = rng_from_seed(3);
    let m = DMatrix::from_fn(7, 7, |_, _| rng.random_range(-1.0..1.0));
    let p = causal_project(&m).unwrap();
    assert_eq!(causal_project(&p).unwrap(), p);
    for r in 0..7 {
        for c in 0..7 {
            if c > r {
                assert_eq!(p[(r, c)], 0.0);
            } else {
                assert_eq!(p[(r, c)], m[(r, c)]);
            }
        }
    }
}

#[test]
fn representation_shapes() {
    let (_, data) = toy_data(300, 12, 10, 0.0);
    let blocks = partition(&data, 3, 8).unwrap();
    let rep = build_representation(&blocks).unwrap();
    assert_eq!(rep.g().shape(), (8, 8));
    assert_eq!(rep.phi().ncols(), 8);
    assert_eq!(rep.psi().ncols(), 6);
    assert_eq!(rep.yf_bar().nrows(), 8);
}

#[test]
fn too_short_record_for_denoising_is_an_error() {
    let (_, data) = toy_data(35, 12, 11, 0.0);
    let blocks = partition(&data, 4, 16).unwrap();
    assert!(denoise(&blocks, 4).is_err());
}

#[test]
fn csv_round_trip() {
    let (_, data) = toy_data(60, 6, 12, 0.1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    data.write_csv(&path).unwrap();
    let back = OfflineData::read_csv(&path).unwrap();
    assert_eq!(back.u(), data.u());
    assert_eq!(back.y(), data.y());
}
