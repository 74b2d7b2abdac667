//! Command-line front end. Every subcommand reads the same JSON config;
//! flags override file values, and `ILC_FORGE_SEED` is the lowest-priority
//! seed source.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};

use crate::behave::{relative_error, write_matrix_csv, OfflineData};
use crate::bench::{
    emit_csv, offline_dataset, run_experiment, toy_system, ConfigFile, ExperimentConfig, Repr,
    ReprChoice, Scenario,
};
use crate::error::{Error, Result};
use crate::ilc::{
    envelopes, jbar, optimal_input, oracle_bounds, run, IlcConfig, PlantOracle, Variant,
};
use crate::lti::{build_lifted, DiscreteStateSpace, SystemDefinition};
use crate::signals::{derive_seed, DisturbanceKind};

pub const SEED_ENV: &str = "ILC_FORGE_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "ilc-forge",
    version,
    about = "Data-driven iterative learning control toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a system and write `k,u,y`.
    Simulate(CommonArgs),
    /// Build the data-driven and baseline lifted maps from offline data.
    Identify(CommonArgs),
    /// Run one ILC variant.
    Ilc(CommonArgs),
    /// Run a full scenario and write CSV files plus a manifest.
    Experiment(CommonArgs),
    /// Print oracle error bounds and convergence envelopes.
    Bounds(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON config file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// JSON system definition, replacing the config's `system`.
    #[arg(long, value_name = "PATH")]
    pub system: Option<PathBuf>,
    /// Master seed (falls back to the config, then ILC_FORGE_SEED).
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub scenario: Option<Scenario>,
    #[arg(long, value_enum, alias = "noise")]
    pub disturbance: Option<DisturbanceKind>,
    #[arg(long, value_enum)]
    pub variant: Option<Variant>,
    /// Variants for `experiment`, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub variants: Option<Vec<Variant>>,
    #[arg(long, value_enum)]
    pub repr: Option<ReprChoice>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Offline signal-to-noise ratio in dB.
    #[arg(long, value_name = "F64", allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Suppress the summary on stdout.
    #[arg(long)]
    pub quiet: bool,
    /// Offline data length T.
    #[arg(long = "T", value_name = "USIZE")]
    pub t: Option<usize>,
    /// Initial window length T_ini.
    #[arg(long = "T-ini", value_name = "USIZE")]
    pub t_ini: Option<usize>,
    /// Trial length N.
    #[arg(long = "N", value_name = "USIZE")]
    pub horizon: Option<usize>,
    /// Number of ILC updates M.
    #[arg(long = "M", value_name = "USIZE")]
    pub trials: Option<usize>,
    /// Hybrid switch window W.
    #[arg(long = "W", value_name = "USIZE")]
    pub window: Option<usize>,
    /// Model order for denoising.
    #[arg(long, value_name = "USIZE")]
    pub order: Option<usize>,
    /// Uniform / sine disturbance bound.
    #[arg(long, value_name = "F64")]
    pub dbar: Option<f64>,
    /// Gaussian disturbance standard deviation.
    #[arg(long, value_name = "F64")]
    pub sigma: Option<f64>,
    /// Sine frequency in rad/s.
    #[arg(long, value_name = "F64")]
    pub omega: Option<f64>,
    /// Hold one sine phase for all trials.
    #[arg(long)]
    pub fixed_phase: bool,
    /// Batch size.
    #[arg(long, value_name = "USIZE")]
    pub systems: Option<usize>,
    /// Offline input amplitude.
    #[arg(long, value_name = "F64")]
    pub input_amplitude: Option<f64>,
    /// Ridge weight of the baseline regression.
    #[arg(long, value_name = "F64")]
    pub ridge: Option<f64>,
    /// Regression horizon of the baseline.
    #[arg(long, value_name = "USIZE")]
    pub fir_horizon: Option<usize>,
    /// Multiplier on the ILC step constant.
    #[arg(long, value_name = "F64")]
    pub safety_factor: Option<f64>,
    /// Lower input bound
    #[arg(long, value_name = "F64", allow_negative_numbers = true)]
    pub box_lower: Option<f64>,
    /// Upper input bound
    #[arg(long, value_name = "F64", allow_negative_numbers = true)]
    pub box_upper: Option<f64>,
    /// Initial input level.
    #[arg(long, value_name = "F64", allow_negative_numbers = true)]
    pub u0: Option<f64>,
    /// Lower end of the random reference range
    #[arg(long, value_name = "F64", allow_negative_numbers = true)]
    pub ref_lo: Option<f64>,
    /// Upper end of the random reference range
    #[arg(long, value_name = "F64", allow_negative_numbers = true)]
    pub ref_hi: Option<f64>,
    /// Initial state, comma separated.
    #[arg(
        long,
        value_name = "F64,...",
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub x0: Option<Vec<f64>>,
    /// Range of random initial states.
    #[arg(long, value_name = "F64")]
    pub x0_range: Option<f64>,
    /// Accuracy target for the switch-time diagnostic.
    #[arg(long, value_name = "F64")]
    pub tau: Option<f64>,
    /// Offline data CSV (`k,u,y`, or `k,u` for simulate).
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,
}

impl CommonArgs {
    /// Config file with flags applied on top.
    pub fn merged(&self) -> Result<ConfigFile> {
        let mut f = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        if let Some(p) = &self.system {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            f.system = Some(SystemDefinition::from_json(&text)?);
        }
        macro_rules! over {
            ($($field:ident),*) => { $( if self.$field.is_some() { f.$field = self.$field.clone(); } )* };
        }
        over!(
            scenario,
            disturbance,
            variant,
            variants,
            repr,
            snr_db,
            t,
            t_ini,
            horizon,
            trials,
            window,
            order,
            dbar,
            sigma,
            omega,
            systems,
            input_amplitude,
            ridge,
            fir_horizon,
            safety_factor,
            box_lower,
            box_upper,
            u0,
            ref_lo,
            ref_hi,
            x0,
            x0_range,
            tau
        );
        if let Some(s) = self.seed {
            f.seed = Some(s);
        } else if f.seed.is_none() {
            if let Ok(v) = std::env::var(SEED_ENV) {
                f.seed = Some(
                    v.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("{SEED_ENV}: not a u64: {v:?}")))?,
                );
            }
        }
        if self.fixed_phase {
            f.fixed_phase = Some(true);
        }
        if let Some(p) = &self.data {
            f.data = Some(p.display().to_string());
        }
        if let Some(p) = &self.out {
            f.out = Some(p.display().to_string());
        }
        Ok(f)
    }
}

/// Parses `args`, runs, and returns the exit status: 0 on success, 2 for
/// usage or config errors, 1 for runtime failures.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => 2,
                _ => 1,
            }
        }
    }
}

pub fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Simulate(a) => simulate_cmd(a),
        Command::Identify(a) => identify_cmd(a),
        Command::Ilc(a) => ilc_cmd(a),
        Command::Experiment(a) => experiment_cmd(a),
        Command::Bounds(a) => bounds_cmd(a),
    }
}

struct Setup {
    file: ConfigFile,
    cfg: ExperimentConfig,
    sys: DiscreteStateSpace,
    quiet: bool,
}

/// Resolves config and system; without a system the toy plant is used and
/// the model order defaults to the system order.
fn setup(args: &CommonArgs) -> Result<Setup> {
    let mut file = args.merged()?;
    let sys = match &file.system {
        Some(def) => def
            .build_discrete()
            .map_err(|e| Error::Config(format!("system: {e}")))?,
        None => toy_system()?,
    };
    if sys.inputs() != 1 {
        return Err(Error::Config(
            "system: a single-input system is required".into(),
        ));
    }
    if file.order.is_none() {
        file.order = Some(sys.order());
    }
    let cfg = ExperimentConfig::resolve(&file)?;
    Ok(Setup {
        file,
        cfg,
        sys,
        quiet: args.quiet,
    })
}

fn initial_state(s: &Setup) -> Result<DVector<f64>> {
    match &s.file.x0 {
        Some(v) if v.len() != s.sys.order() => Err(Error::Config(format!(
            "x0: expected {} entries, got {}",
            s.sys.order(),
            v.len()
        ))),
        Some(v) => Ok(DVector::from_column_slice(v)),
        None => Ok(DVector::zeros(s.sys.order())),
    }
}

fn out_dir(s: &Setup) -> Option<PathBuf> {
    s.file.out.as_ref().map(PathBuf::from)
}

fn say(quiet: bool, text: impl AsRef<str>) {
    if !quiet {
        println!("{}", text.as_ref());
    }
}

fn offline(s: &Setup) -> Result<OfflineData> {
    match &s.file.data {
        Some(p) => OfflineData::read_csv(p).map_err(|e| Error::Config(format!("data: {e}"))),
        None => offline_dataset(&s.sys, &s.cfg, s.cfg.disturbance, s.cfg.seed, 1.0),
    }
}

fn read_inputs(path: &Path) -> Result<Vec<f64>> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| Error::Config(format!("data: {e}")))?;
    let col = reader
        .headers()?
        .iter()
        .position(|h| h == "u")
        .ok_or_else(|| Error::Config("data: no `u` column".into()))?;
    reader
        .records()
        .map(|r| {
            let r = r?;
            r[col]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("data: bad input {:?}: {e}", &r[col])))
        })
        .collect()
}

fn simulate_cmd(args: &CommonArgs) -> Result<()> {
    let s = setup(args)?;
    let x0 = initial_state(&s)?;
    let u = match &s.file.data {
        Some(p) => read_inputs(Path::new(p))?,
        None => {
            let seed = derive_seed(s.cfg.seed, 1);
            let a = s.cfg.input_amplitude;
            crate::signals::ReferenceSpec::Uniform { lo: -a, hi: a }
                .generate(s.cfg.horizon + 1, seed)?
        }
    };
    let d = s
        .cfg
        .online_disturbance()
        .generate(u.len(), derive_seed(s.cfg.seed, 3));
    let data = OfflineData::collect(&s.sys, &x0, u, Some(&d))?;
    match out_dir(&s) {
        Some(dir) => {
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("simulate.csv");
            data.write_csv(&path)?;
            say(s.quiet, format!("wrote {}", path.display()));
        }
        None => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.write_record(["k", "u", "y"])?;
            for (k, (u, y)) in data.u().iter().zip(data.y()).enumerate() {
                w.write_record([k.to_string(), format!("{u:e}"), format!("{y:e}")])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn truth(s: &Setup) -> Result<DMatrix<f64>> {
    Ok(
        build_lifted(&s.sys, &DVector::zeros(s.sys.order()), s.cfg.horizon)?
            .g()
            .clone(),
    )
}

fn estimate(s: &Setup, data: &OfflineData, repr: Repr) -> Result<DMatrix<f64>> {
    match repr {
        Repr::Dd => {
            Ok(
                crate::behave::identify(data, s.cfg.t_ini, s.cfg.horizon, Some(s.cfg.order))?
                    .g()
                    .clone(),
            )
        }
        Repr::Si => {
            crate::behave::baseline_parametric(data, s.cfg.horizon, s.cfg.ridge, s.cfg.fir_horizon)
        }
    }
}

fn identify_cmd(args: &CommonArgs) -> Result<()> {
    let s = setup(args)?;
    let data = offline(&s)?;
    let g = truth(&s)?;
    let probe = DVector::from_column_slice(
        &crate::signals::ReferenceSpec::Uniform {
            lo: s.cfg.box_lower,
            hi: s.cfg.box_upper,
        }
        .generate(s.cfg.horizon, derive_seed(s.cfg.seed, 7))?,
    );
    let dir = out_dir(&s);
    if let Some(d) = &dir {
        std::fs::create_dir_all(d)?;
    }
    for repr in s.cfg.repr.reprs() {
        let g_tilde = estimate(&s, &data, repr)?;
        let err = relative_error(&g, &g_tilde, &probe)?;
        say(s.quiet, format!("{} relative error: {err:e}", repr.name()));
        if let Some(d) = &dir {
            write_matrix_csv(d.join(format!("g_{}.csv", repr.name())), &g_tilde)?;
        }
    }
    Ok(())
}

struct Prepared {
    lifted: crate::lti::LiftedSystem,
    reference: DVector<f64>,
    config: IlcConfig,
    oracle: PlantOracle,
    repr: Repr,
}

fn prepare_ilc(s: &Setup) -> Result<Prepared> {
    let data = offline(s)?;
    let repr = s.cfg.repr.reprs()[0];
    let g_tilde = estimate(s, &data, repr)?;
    let n = s.cfg.horizon;
    let reference = DVector::from_column_slice(
        &crate::signals::ReferenceSpec::Uniform {
            lo: s.cfg.ref_lo,
            hi: s.cfg.ref_hi,
        }
        .generate(n, derive_seed(s.cfg.seed, 4))?,
    );
    let x0 = match &s.file.x0 {
        Some(_) => initial_state(s)?,
        None => DVector::from_column_slice(
            &crate::signals::ReferenceSpec::Uniform {
                lo: -s.cfg.x0_range,
                hi: s.cfg.x0_range,
            }
            .generate(s.sys.order(), derive_seed(s.cfg.seed, 5))?,
        ),
    };
    let bounds = s.cfg.fixed_box()?;
    let u0 = DVector::from_element(n, s.cfg.u0.unwrap_or(bounds.center()));
    let lifted = build_lifted(&s.sys, &x0, n)?;
    let config = IlcConfig::new(s.cfg.variants[0], g_tilde, bounds, u0)
        .with_trials(s.cfg.trials)
        .with_window(s.cfg.window)
        .with_safety_factor(s.cfg.safety_factor);
    let oracle = PlantOracle::new(
        s.sys.clone(),
        x0,
        reference.clone(),
        s.cfg.online_disturbance(),
        derive_seed(s.cfg.seed, 6),
    )?;
    Ok(Prepared {
        lifted,
        reference,
        config,
        oracle,
        repr,
    })
}

fn ilc_cmd(args: &CommonArgs) -> Result<()> {
    let s = setup(args)?;
    let p = prepare_ilc(&s)?;
    let result = run(&p.oracle, &p.config)?;
    let u_star = optimal_input(&p.lifted, &p.reference, &p.config.bounds)?;
    match out_dir(&s) {
        Some(dir) => {
            std::fs::create_dir_all(&dir)?;
            let name = format!(
                "ilc_{}_{}_{}.csv",
                p.config.variant.name(),
                p.repr.name(),
                s.cfg.disturbance.name()
            );
            result.save_csv(dir.join(&name), Some(&u_star))?;
            say(s.quiet, format!("wrote {}", dir.join(name).display()));
        }
        None if !s.quiet => result.write_csv(std::io::stdout(), Some(&u_star))?,
        None => {}
    }
    let last = result.final_record();
    let switch = result
        .switch_index
        .map_or("none".to_string(), |j| j.to_string());
    eprintln!(
        "{} final ||eps|| = {:e} after {} trials (switch: {switch})",
        p.config.variant, last.eps_norm, last.j
    );
    Ok(())
}

fn experiment_cmd(args: &CommonArgs) -> Result<()> {
    let file = args.merged()?;
    let cfg = ExperimentConfig::resolve(&file)?;
    let dir = PathBuf::from(
        file.out
            .clone()
            .unwrap_or_else(|| format!("results/{}", cfg.scenario.name())),
    );
    let report = run_experiment(&cfg)?;
    let manifest = emit_csv(&report, &cfg, &dir)?;
    if !args.quiet {
        println!(
            "{} files written to {}",
            manifest.files.len() + 1,
            dir.display()
        );
        if cfg.scenario == Scenario::Batch && manifest.excluded_systems > 0 {
            println!("{} systems excluded", manifest.excluded_systems);
        }
    }
    Ok(())
}

fn bounds_cmd(args: &CommonArgs) -> Result<()> {
    let s = setup(args)?;
    let p = prepare_ilc(&s)?;
    let spec = s.cfg.online_disturbance();
    // Gaussian noise has no hard bound; three standard deviations stand in
    let dbar = spec.amplitude_bound().unwrap_or(3.0 * s.cfg.sigma);
    let jb = jbar(p.lifted.g(), p.lifted.c(), &p.reference, &p.config.bounds);
    let b = oracle_bounds(p.lifted.g(), &p.config.g_tilde, dbar, &p.config.bounds, jb)?;
    let result = run(&p.oracle, &p.config)?;
    let u_star = optimal_input(&p.lifted, &p.reference, &p.config.bounds)?;
    let report = envelopes(&result, &p.lifted, &p.reference, &u_star, &b, s.cfg.tau);
    let mut out = std::io::stdout();
    if !s.quiet {
        writeln!(out, "J_bar       {:e} ({:?})", b.jbar.value, b.jbar.kind)?;
        writeln!(out, "delta1      {:e}", b.delta1)?;
        writeln!(out, "delta2      {:e}", b.delta2)?;
        writeln!(out, "delta       {:e}", b.delta)?;
        writeln!(out, "diameter    {:e}", b.diameter)?;
        writeln!(out, "L           {:e}", report.lipschitz)?;
        writeln!(out, "xi          {:e}", report.strong_convexity)?;
        match report.j_star {
            Some(j) => writeln!(
                out,
                "j_star      {j:e} (oracle diagnostic, tau = {:e})",
                s.cfg.tau
            )?,
            None => writeln!(out, "j_star      unavailable (tau <= delta)")?,
        }
        writeln!(
            out,
            "violations  {} of {}",
            report.violations(),
            report.rows.len()
        )?;
    }
    if let Some(dir) = out_dir(&s) {
        std::fs::create_dir_all(&dir)?;
        let name = format!(
            "bounds_{}_{}_{}.csv",
            p.config.variant.name(),
            p.repr.name(),
            s.cfg.disturbance.name()
        );
        report.write_csv(std::fs::File::create(dir.join(name))?)?;
    }
    Ok(())
}
