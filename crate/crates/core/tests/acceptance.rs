//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line with
//! the measured quantity, the threshold and the wall time.

use std::time::{Duration, Instant};

use ilc_forge::behave::{identify, OfflineData};
use ilc_forge::bench::{
    batch_experiment, case_study, emit_csv, offline_dataset, run_experiment, toy_relative_errors,
    toy_system, ExperimentConfig, Repr, Scenario,
};
use ilc_forge::ilc::{
    envelopes, inexact_gradient, jbar, oracle_bounds, run, IlcConfig, JBarKind, LiftedOracle,
    Measurement, PlantOracle, TrialOracle, Variant,
};
use ilc_forge::lti::{
    build_lifted, random_system, BoxConstraint, DiscreteStateSpace, LiftedSystem, SampleTime,
};
use ilc_forge::signals::{
    derive_seed, gen_pe_input, rng_from_seed, DisturbanceKind, DisturbanceSpec,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

fn report(id: u32, ok: bool, detail: &str, elapsed: Duration, limit: Option<Duration>) -> bool {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let pass = ok && in_time;
    let limit = limit
        .map(|l| format!(" (limit {}s)", l.as_secs()))
        .unwrap_or_default();
    println!(
        "criterion {id}: {} | {detail} | {:.2}s{limit}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn uniform(len: usize, lo: f64, hi: f64, seed: u64) -> DVector<f64> {
    let mut rng = rng_from_seed(seed);
    DVector::from_fn(len, |_, _| rng.random_range(lo..=hi))
}

#[test]
fn criterion_01_exact_data_identity() {
    let start = Instant::now();
    let (t, t_ini, n) = (1000, 4, 20);
    let sys = toy_system().unwrap();
    let g = build_lifted(&sys, &DVector::zeros(4), n)
        .unwrap()
        .g()
        .clone();
    let u = gen_pe_input(t, t_ini + n + 1, 4, 2024, 1.0).unwrap();
    let x0 = DVector::from_vec(vec![0.4, -0.3, 0.2, -0.1]);
    let data = OfflineData::collect(&sys, &x0, u, None).unwrap();
    let g_dd = identify(&data, t_ini, n, Some(4)).unwrap().g().clone();

    let frob = (&g_dd - &g).norm() / g.norm();
    let mut worst_out = 0.0f64;
    for k in 0..5u64 {
        let probe = uniform(n, -20.0, 20.0, derive_seed(7, k));
        worst_out = worst_out.max((&g * &probe - &g_dd * &probe).norm() / (&g * &probe).norm());
    }
    let ok = frob <= 1e-6 && worst_out <= 1e-6;
    let detail =
        format!("||G~-G||_F/||G||_F = {frob:.3e}, output error {worst_out:.3e} (both <= 1e-6)");
    assert!(report(
        1,
        ok,
        &detail,
        start.elapsed(),
        Some(Duration::from_secs(5))
    ));
}

#[test]
fn criterion_02_relative_error_orderings() {
    let start = Instant::now();
    let mut by_kind: Vec<(Vec<f64>, Vec<f64>)> = vec![(vec![], vec![]); DisturbanceKind::ALL.len()];
    for seed in 0..20u64 {
        let mut cfg = ExperimentConfig::defaults(Scenario::Toy);
        cfg.seed = seed;
        assert_eq!(cfg.snr_db, Some(10.0));
        assert_eq!((cfg.dbar, cfg.sigma), (3.0, 1.0));
        for row in toy_relative_errors(&cfg).unwrap() {
            let i = DisturbanceKind::ALL
                .iter()
                .position(|k| *k == row.disturbance)
                .unwrap();
            by_kind[i].0.push(row.dd);
            by_kind[i].1.push(row.si);
        }
    }
    let med = |kind: DisturbanceKind| {
        let i = DisturbanceKind::ALL
            .iter()
            .position(|k| *k == kind)
            .unwrap();
        (median(by_kind[i].0.clone()), median(by_kind[i].1.clone()))
    };
    let (sine_dd, sine_si) = med(DisturbanceKind::Sine);
    let (uni_dd, uni_si) = med(DisturbanceKind::Uniform);
    let (gau_dd, gau_si) = med(DisturbanceKind::Gaussian);
    let ok = 100.0 * sine_dd <= sine_si && uni_si < uni_dd && gau_si < gau_dd;
    let detail = format!(
        "medians over 20 seeds: sine dd {sine_dd:.3e} si {sine_si:.3e} (ratio {:.0}, need >= 100); \
         uniform dd {uni_dd:.4} si {uni_si:.4}; gaussian dd {gau_dd:.4} si {gau_si:.4} (need si < dd)",
        sine_si / sine_dd
    );
    assert!(report(
        2,
        ok,
        &detail,
        start.elapsed(),
        Some(Duration::from_secs(120))
    ));
}

struct Instance {
    lifted: LiftedSystem,
    r: DVector<f64>,
    bounds: BoxConstraint,
    u_star: DVector<f64>,
    cond: f64,
}

/// Random order-4 plants with `cond(G) <= 8` and an interior optimum.
fn well_conditioned_instances(count: usize, n: usize, base: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    let mut k = 0u64;
    while out.len() < count {
        assert!(k < 100_000, "too few well-conditioned draws");
        let seed = derive_seed(base, k);
        k += 1;
        let sys = random_system(4, seed).unwrap();
        let x0 = uniform(4, -1.0, 1.0, derive_seed(seed, 1));
        let lifted = build_lifted(&sys, &x0, n).unwrap();
        let cond = (lifted.lipschitz() / lifted.strong_convexity()).sqrt();
        if cond > 8.0 {
            continue;
        }
        let r = uniform(n, -1.0, 1.0, derive_seed(seed, 2));
        let u_star = lifted.unconstrained_optimum(&r).unwrap();
        let half = 1.5 * u_star.amax();
        let bounds = BoxConstraint::new(-half, half, n).unwrap();
        out.push(Instance {
            lifted,
            r,
            bounds,
            u_star,
            cond,
        });
    }
    out
}

fn exact_envelope_run(
    inst: &Instance,
    variant: Variant,
    trials: usize,
) -> (usize, Option<usize>, f64) {
    let oracle = LiftedOracle::new(
        inst.lifted.clone(),
        inst.r.clone(),
        DisturbanceSpec::None,
        0,
    )
    .unwrap();
    let cfg = IlcConfig::new(
        variant,
        inst.lifted.g().clone(),
        inst.bounds,
        DVector::zeros(inst.r.len()),
    )
    .with_trials(trials);
    let out = run(&oracle, &cfg).unwrap();
    let jb = jbar(inst.lifted.g(), inst.lifted.c(), &inst.r, &inst.bounds);
    let exact = oracle_bounds(inst.lifted.g(), inst.lifted.g(), 0.0, &inst.bounds, jb).unwrap();
    assert_eq!(exact.delta, 0.0);
    let rep = envelopes(&out, &inst.lifted, &inst.r, &inst.u_star, &exact, 1e-3);
    let checked = rep
        .rows
        .iter()
        .filter(|row| row.j >= 1 && row.envelope.is_some())
        .count();
    assert_eq!(checked, trials);
    let reach = rep.rows.iter().find(|row| row.gap <= 1e-3).map(|row| row.j);
    let worst = rep
        .rows
        .iter()
        .filter_map(|row| row.envelope.map(|e| row.gap / e))
        .fold(0.0, f64::max);
    (rep.violations(), reach, worst)
}

#[test]
fn criterion_03_classical_envelope() {
    let start = Instant::now();
    let mut violations = 0;
    let mut worst = 0.0f64;
    for inst in well_conditioned_instances(10, 20, 3) {
        let (v, _, w) = exact_envelope_run(&inst, Variant::Classical, 500);
        violations += v;
        worst = worst.max(w);
    }
    let detail =
        format!("10 instances x 500 trials: {violations} violations, max gap/envelope {worst:.3}");
    assert!(report(
        3,
        violations == 0,
        &detail,
        start.elapsed(),
        Some(Duration::from_secs(30))
    ));
}

#[test]
fn criterion_04_fast_envelope_and_speed() {
    let start = Instant::now();
    let mut violations = 0;
    let mut worst = 0.0f64;
    let mut faster = 0;
    let mut lines = Vec::new();
    let instances = well_conditioned_instances(10, 20, 3);
    for inst in &instances {
        let (v, fast_reach, w) = exact_envelope_run(inst, Variant::Fast, 500);
        let (_, classical_reach, _) = exact_envelope_run(inst, Variant::Classical, 500);
        violations += v;
        worst = worst.max(w);
        let f = fast_reach.unwrap_or(usize::MAX);
        let c = classical_reach.unwrap_or(usize::MAX);
        if f < c {
            faster += 1;
        }
        lines.push(format!(
            "cond {:.1}: fast {:?} classical {:?}",
            inst.cond, fast_reach, classical_reach
        ));
    }
    for l in &lines {
        println!("  {l}");
    }
    let ok = violations == 0 && faster == instances.len();
    let detail = format!(
        "{violations} violations, max gap/envelope {worst:.3}; fast reached gap <= 1e-3 first on {faster}/10"
    );
    assert!(report(
        4,
        ok,
        &detail,
        start.elapsed(),
        Some(Duration::from_secs(30))
    ));
}

#[test]
fn criterion_05_oracle_error_bounds_monte_carlo() {
    let start = Instant::now();
    let n = 12;
    let samples = 10_000;
    let mut v1 = 0;
    let mut v2 = 0;
    let mut tight1 = 0.0f64;
    let mut tight2 = 0.0f64;
    for inst_idx in 0..10u64 {
        let seed = derive_seed(55, inst_idx);
        let sys = random_system(4, seed).unwrap();
        let x0 = uniform(4, -1.0, 1.0, derive_seed(seed, 1));
        let lifted = build_lifted(&sys, &x0, n).unwrap();
        let g = lifted.g().clone();
        let mut rng = rng_from_seed(derive_seed(seed, 2));
        // a causal estimate with a few percent of error
        let scale = 0.05 * g.amax();
        let g_tilde = DMatrix::from_fn(n, n, |i, j| {
            if j <= i {
                g[(i, j)] + rng.random_range(-scale..=scale)
            } else {
                0.0
            }
        });
        let r = uniform(n, -3.0, 3.0, derive_seed(seed, 3));
        let bounds = BoxConstraint::new(-2.0, 2.0, n).unwrap();
        let dbar = 0.1 * (inst_idx as f64 + 1.0);
        let jb = jbar(&g, lifted.c(), &r, &bounds);
        assert_eq!(jb.kind, JBarKind::Exact);
        let b = oracle_bounds(&g, &g_tilde, dbar, &bounds, jb).unwrap();
        for _ in 0..samples {
            let u = DVector::from_fn(n, |_, _| rng.random_range(-2.0..=2.0));
            let d = DVector::from_fn(n, |_, _| rng.random_range(-dbar..=dbar));
            let exact = &r - lifted.output(&u);
            let measured = &exact - &d;
            let j = lifted.cost(&u, &r);
            let j_tilde = 0.5 * measured.norm_squared();
            let grad_gap = (lifted.gradient(&u, &r) - inexact_gradient(&g_tilde, &measured)).norm();
            let f_gap = (j - j_tilde).abs();
            v1 += usize::from(f_gap > b.delta1);
            v2 += usize::from(grad_gap > b.delta2);
            tight1 = tight1.max(f_gap / b.delta1);
            tight2 = tight2.max(grad_gap / b.delta2);
        }
    }
    let detail = format!(
        "10 x 1e4 samples: {v1} value violations (max ratio {tight1:.3}), {v2} gradient violations (max ratio {tight2:.3})"
    );
    assert!(report(
        5,
        v1 == 0 && v2 == 0,
        &detail,
        start.elapsed(),
        Some(Duration::from_secs(60))
    ));
}

/// Presents trial `k` as trial `k + offset` of the wrapped oracle.
struct Shifted<'a> {
    inner: &'a dyn TrialOracle,
    offset: usize,
}

impl TrialOracle for Shifted<'_> {
    fn reference(&self) -> &DVector<f64> {
        self.inner.reference()
    }

    fn measure(&self, trial: usize, u: &DVector<f64>) -> ilc_forge::Result<Measurement> {
        self.inner.measure(trial + self.offset, u)
    }
}

#[test]
fn criterion_06_hybrid_replay() {
    let start = Instant::now();
    let cfg = ExperimentConfig::defaults(Scenario::Toy);
    let sys: DiscreteStateSpace = toy_system().unwrap();
    let n = cfg.horizon;
    let data = offline_dataset(&sys, &cfg, DisturbanceKind::Sine, 3, 1.0).unwrap();
    let g_tilde = identify(&data, cfg.t_ini, n, Some(cfg.order))
        .unwrap()
        .g()
        .clone();
    let r = uniform(n, -10.0, 10.0, 31);
    let noise = DisturbanceSpec::Sine {
        bound: 3.0,
        omega: 100.0,
        ts: 1.0,
        fixed_phase: false,
    };
    let oracle = PlantOracle::new(sys, DVector::from_element(4, 0.5), r, noise, 99).unwrap();
    let bounds = BoxConstraint::new(-20.0, 20.0, n).unwrap();
    let m = 300;
    let base = IlcConfig::new(Variant::Hybrid, g_tilde, bounds, DVector::zeros(n))
        .with_trials(m)
        .with_window(cfg.window);

    let hybrid = run(&oracle, &base).unwrap();
    let Some(s) = hybrid.switch_index else {
        assert!(report(
            6,
            false,
            "no switch recorded",
            start.elapsed(),
            None
        ));
        return;
    };
    let fast = run(
        &oracle,
        &base.clone().with_variant(Variant::Fast).with_trials(s),
    )
    .unwrap();
    let fast_ok = (0..=s).all(|j| fast.records[j].u == hybrid.records[j].u);

    let tail_cfg = IlcConfig {
        u0: hybrid.records[s].u.clone(),
        ..base.clone()
    }
    .with_variant(Variant::Classical)
    .with_trials(m - s);
    let tail = run(
        &Shifted {
            inner: &oracle,
            offset: s,
        },
        &tail_cfg,
    )
    .unwrap();
    let classical_ok = (0..=m - s).all(|k| tail.records[k].u == hybrid.records[s + k].u);

    let flags: Vec<bool> = hybrid.records.iter().map(|r| r.switched).collect();
    let monotone = flags.windows(2).all(|w| !w[0] || w[1]);
    let flip_at = flags.iter().position(|&f| f);
    let sf_ok = monotone && flip_at == Some(s + 1);

    let detail = format!(
        "switch s = {s}; trials <= s equal fast: {fast_ok}; trials > s equal classical from u_s: {classical_ok}; \
         SF monotone, first set at s+1: {sf_ok}"
    );
    assert!(report(
        6,
        fast_ok && classical_ok && sf_ok,
        &detail,
        start.elapsed(),
        None
    ));
}

#[test]
fn criterion_07_batch_statistics() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::defaults(Scenario::Batch);
    cfg.dbar = 3.0;
    let high = batch_experiment(&cfg).unwrap();
    cfg.dbar = 0.5;
    let low = batch_experiment(&cfg).unwrap();

    let dd_below_si = high.mean_dd_error < high.mean_si_error;
    // both laws see identical per-trial noise, so converged systems can tie
    // to rounding; the envelope slack applies
    let tie = |a: f64, b: f64| a <= b + 1e-9 * (1.0 + b.abs());
    let mut stage_ok = true;
    let mut stage_text = Vec::new();
    for repr in [Repr::Dd, Repr::Si] {
        let h = high.stage(Variant::Hybrid, repr).unwrap().final_stage.p50;
        let c = high
            .stage(Variant::Classical, repr)
            .unwrap()
            .final_stage
            .p50;
        stage_ok &= tie(h, c);
        stage_text.push(format!("{} hybrid {h:.15} classical {c:.15}", repr.name()));
    }
    let ratio = low.mean_dd_error / low.mean_si_error;
    let similar = (0.5..=2.0).contains(&ratio);
    let excluded = high.failures.len() + low.failures.len();

    let ok = dd_below_si && stage_ok && similar && excluded == 0;
    let detail = format!(
        "dbar=3: mean dd {:.4} < si {:.4}: {dd_below_si}; final-stage medians {}: {stage_ok}; \
         dbar=0.5: mean dd {:.4} si {:.4} ratio {ratio:.2} (within 2x: {similar}); excluded {excluded}",
        high.mean_dd_error,
        high.mean_si_error,
        stage_text.join(", "),
        low.mean_dd_error,
        low.mean_si_error
    );
    assert!(report(
        7,
        ok,
        &detail,
        start.elapsed(),
        Some(Duration::from_secs(600))
    ));
}

#[test]
fn criterion_08_case_study_beats_feedback() {
    let start = Instant::now();
    let cfg = ExperimentConfig::defaults(Scenario::CaseStudy);
    assert_eq!(cfg.disturbance, DisturbanceKind::None);
    let rep = case_study(&cfg).unwrap();
    let fb = *rep.feedback.eps_norms.last().unwrap();
    let mut ok = rep.curves.len() == 6;
    let mut parts = Vec::new();
    for c in &rep.curves {
        let e = c.run.final_record().eps_norm;
        ok &= 10.0 * e <= fb;
        parts.push(format!("{}/{} {e:.4}", c.run.variant.name(), c.repr.name()));
    }
    let detail = format!(
        "feedback-only {fb:.4}; final |eps|: {} (need 10x below)",
        parts.join(", ")
    );
    assert!(report(
        8,
        ok,
        &detail,
        start.elapsed(),
        Some(Duration::from_secs(30))
    ));
}

#[test]
fn criterion_09_desk_scale_oracles() {
    let start = Instant::now();
    let a = DMatrix::from_row_slice(3, 3, &[0.5, 0.1, 0.0, 0.0, 0.3, 0.2, 0.1, 0.0, -0.4]);
    let b = DMatrix::from_column_slice(3, 1, &[1.0, 0.5, -0.25]);
    let c = nalgebra::RowDVector::from_row_slice(&[1.0, 1.0, 2.0]);
    let b_col = DVector::from_column_slice(b.as_slice());
    let sys =
        DiscreteStateSpace::siso(a.clone(), b_col, c.clone(), 0.0, SampleTime::Abstract).unwrap();
    let x0 = DVector::from_vec(vec![1.0, 2.0, -1.0]);
    let lifted = build_lifted(&sys, &x0, 3).unwrap();

    // hand recursion: y(k) = C x(k), x(k+1) = A x(k) + B u(k), y over k = 1..=3
    let respond = |x: &DVector<f64>, u: [f64; 3]| {
        let mut x = x.clone();
        let mut y = Vec::new();
        for uk in u {
            x = &a * &x + &b * DVector::from_element(1, uk);
            y.push((&c * &x)[0]);
        }
        DVector::from_vec(y)
    };
    let c_ref = respond(&x0, [0.0; 3]);
    let zero = DVector::zeros(3);
    let g_ref = DMatrix::from_fn(3, 3, |i, j| {
        let mut u = [0.0; 3];
        u[j] = 1.0;
        respond(&zero, u)[i]
    });
    let map_err = (lifted.g() - &g_ref)
        .amax()
        .max((lifted.c() - &c_ref).amax());

    // brute-force grid over the box contains every vertex
    let bounds = BoxConstraint::new(-1.5, 2.0, 3).unwrap();
    let r = DVector::from_vec(vec![0.3, -0.7, 1.1]);
    let jb = jbar(lifted.g(), lifted.c(), &r, &bounds);
    let steps = 14;
    let grid = |i: usize| -1.5 + 3.5 * i as f64 / steps as f64;
    let mut brute = f64::NEG_INFINITY;
    for i in 0..=steps {
        for j in 0..=steps {
            for k in 0..=steps {
                let u = DVector::from_vec(vec![grid(i), grid(j), grid(k)]);
                let e = &r - &g_ref * &u - &c_ref;
                brute = brute.max(0.5 * e.norm_squared());
            }
        }
    }
    let jbar_err = (jb.value - brute).abs() / brute;
    let ok = map_err <= 1e-14 && jbar_err <= 1e-14 && jb.kind == JBarKind::Exact;
    let detail = format!("N=3 max |G-G_ref|,|c-c_ref| = {map_err:.1e}; jbar {:.12} vs grid {brute:.12} (rel {jbar_err:.1e})", jb.value);
    assert!(report(9, ok, &detail, start.elapsed(), None));
}

fn dir_bytes(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_10_byte_identical_reruns() {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for scenario in [Scenario::Toy, Scenario::CaseStudy, Scenario::Batch] {
        let mut cfg = ExperimentConfig::defaults(scenario);
        cfg.seed = 7;
        if scenario == Scenario::Batch {
            cfg.systems = 8;
        }
        let mut runs = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().unwrap();
            let rep = run_experiment(&cfg).unwrap();
            emit_csv(&rep, &cfg, dir.path()).unwrap();
            runs.push(dir_bytes(dir.path()));
        }
        let same = runs[0] == runs[1] && !runs[0].is_empty();
        ok &= same;
        parts.push(format!(
            "{}: {} files identical {same}",
            scenario.name(),
            runs[0].len()
        ));
    }
    assert!(report(10, ok, &parts.join("; "), start.elapsed(), None));
}
