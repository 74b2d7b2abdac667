use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ilc::Variant;
use crate::lti::{BoxConstraint, SystemDefinition};
use crate::signals::{DisturbanceKind, DisturbanceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Toy,
    Batch,
    CaseStudy,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Toy => "toy",
            Scenario::Batch => "batch",
            Scenario::CaseStudy => "case-study",
        }
    }

    /// Sample time used to place the sine disturbance on the sample grid.
    pub fn sample_time(&self) -> f64 {
        match self {
            Scenario::Toy | Scenario::Batch => 1.0,
            Scenario::CaseStudy => 0.01,
        }
    }
}

/// Which lifted maps to learn with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReprChoice {
    Dd,
    Si,
    Both,
}

impl ReprChoice {
    pub fn reprs(&self) -> Vec<Repr> {
        match self {
            ReprChoice::Dd => vec![Repr::Dd],
            ReprChoice::Si => vec![Repr::Si],
            ReprChoice::Both => vec![Repr::Dd, Repr::Si],
        }
    }
}

/// Data-driven (Hankel) map or the least-squares Markov-parameter baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Repr {
    Dd,
    Si,
}

impl Repr {
    pub fn name(&self) -> &'static str {
        match self {
            Repr::Dd => "dd",
            Repr::Si => "si",
        }
    }
}

/// The shared JSON configuration. Every key is optional; missing values
/// take the defaults of the selected scenario.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub system: Option<SystemDefinition>,
    pub scenario: Option<Scenario>,
    #[serde(rename = "T")]
    pub t: Option<usize>,
    #[serde(rename = "T_ini")]
    pub t_ini: Option<usize>,
    #[serde(rename = "N")]
    pub horizon: Option<usize>,
    #[serde(rename = "M")]
    pub trials: Option<usize>,
    #[serde(rename = "W")]
    pub window: Option<usize>,
    pub order: Option<usize>,
    pub disturbance: Option<DisturbanceKind>,
    pub dbar: Option<f64>,
    pub sigma: Option<f64>,
    pub omega: Option<f64>,
    pub fixed_phase: Option<bool>,
    pub snr_db: Option<f64>,
    pub seed: Option<u64>,
    pub repr: Option<ReprChoice>,
    pub variant: Option<Variant>,
    pub variants: Option<Vec<Variant>>,
    pub systems: Option<usize>,
    pub input_amplitude: Option<f64>,
    pub ridge: Option<f64>,
    pub fir_horizon: Option<usize>,
    pub safety_factor: Option<f64>,
    pub box_lower: Option<f64>,
    pub box_upper: Option<f64>,
    pub u0: Option<f64>,
    pub ref_lo: Option<f64>,
    pub ref_hi: Option<f64>,
    pub x0: Option<Vec<f64>>,
    pub x0_range: Option<f64>,
    pub tau: Option<f64>,
    /// CSV with header `k,u,y` (identify) or `k,u` (simulate).
    pub data: Option<String>,
    pub out: Option<String>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// Fully resolved experiment settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "T_ini")]
    pub t_ini: usize,
    #[serde(rename = "N")]
    pub horizon: usize,
    #[serde(rename = "M")]
    pub trials: usize,
    #[serde(rename = "W")]
    pub window: usize,
    /// Model order used for denoising and excitation.
    pub order: usize,
    pub disturbance: DisturbanceKind,
    pub dbar: f64,
    pub sigma: f64,
    pub omega: f64,
    pub fixed_phase: bool,
    /// Offline SNR target; `None` keeps the raw disturbance level.
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub repr: ReprChoice,
    pub variants: Vec<Variant>,
    /// Batch size.
    pub systems: usize,
    /// Offline input is uniform on `[-a, a]`.
    pub input_amplitude: f64,
    pub ridge: f64,
    pub fir_horizon: Option<usize>,
    pub safety_factor: f64,
    /// Box bounds. In the batch scenario each system draws its lower bound
    /// from `[box_lower, box_lower / 2]` and its upper bound from
    /// `[box_upper / 2, box_upper]`.
    pub box_lower: f64,
    pub box_upper: f64,
    /// Initial input level; `None` uses the box centre.
    pub u0: Option<f64>,
    pub ref_lo: f64,
    pub ref_hi: f64,
    /// Online initial state entries are uniform on `[-x0_range, x0_range]`.
    pub x0_range: f64,
    /// Accuracy target for the switch-time diagnostic.
    pub tau: f64,
}

impl ExperimentConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let all = Variant::ALL.to_vec();
        match scenario {
            Scenario::Toy => Self {
                scenario,
                t: 1000,
                t_ini: 4,
                horizon: 20,
                trials: 500,
                window: 20,
                order: 4,
                disturbance: DisturbanceKind::Sine,
                dbar: 3.0,
                sigma: 1.0,
                omega: 100.0,
                fixed_phase: false,
                snr_db: Some(10.0),
                seed: 0,
                repr: ReprChoice::Both,
                variants: all,
                systems: 1,
                input_amplitude: 1.0,
                ridge: 0.0,
                fir_horizon: None,
                safety_factor: 1.0,
                box_lower: -20.0,
                box_upper: 20.0,
                u0: None,
                ref_lo: -10.0,
                ref_hi: 10.0,
                x0_range: 10.0,
                tau: 1e-2,
            },
            Scenario::Batch => Self {
                scenario,
                snr_db: None,
                systems: 100,
                input_amplitude: 5.0,
                ..Self::defaults(Scenario::Toy)
            },
            Scenario::CaseStudy => Self {
                scenario,
                t: 500,
                t_ini: 12,
                horizon: 10,
                trials: 20,
                window: 5,
                order: 6,
                disturbance: DisturbanceKind::None,
                dbar: 0.1,
                snr_db: None,
                input_amplitude: 5.0,
                box_lower: 0.0,
                box_upper: 10.0,
                u0: Some(5.0),
                ref_lo: 0.77,
                ref_hi: 0.81,
                x0_range: 0.0,
                tau: 1e-4,
                ..Self::defaults(Scenario::Toy)
            },
        }
    }

    /// Scenario defaults overlaid with the file's values.
    pub fn resolve(file: &ConfigFile) -> Result<Self> {
        let mut c = Self::defaults(file.scenario.unwrap_or(Scenario::Toy));
        macro_rules! take {
            ($($field:ident),*) => { $( if let Some(v) = file.$field.clone() { c.$field = v; } )* };
        }
        take!(
            t,
            t_ini,
            horizon,
            trials,
            window,
            order,
            disturbance,
            dbar,
            sigma,
            omega,
            fixed_phase,
            seed,
            repr,
            variants,
            systems,
            input_amplitude,
            ridge,
            safety_factor,
            box_lower,
            box_upper,
            ref_lo,
            ref_hi,
            x0_range,
            tau
        );
        if let Some(v) = file.variant {
            c.variants = vec![v];
        }
        if file.snr_db.is_some() {
            c.snr_db = file.snr_db;
        }
        if file.fir_horizon.is_some() {
            c.fir_horizon = file.fir_horizon;
        }
        if file.u0.is_some() {
            c.u0 = file.u0;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |key: &str, why: &str| Err(Error::Config(format!("{key}: {why}")));
        if self.t_ini == 0 {
            return fail("T_ini", "must be positive");
        }
        if self.horizon == 0 {
            return fail("N", "must be positive");
        }
        if self.window == 0 {
            return fail("W", "must be at least 1");
        }
        if self.order == 0 {
            return fail("order", "must be positive");
        }
        if self.t + 2 < 2 * (self.t_ini + self.horizon) + self.order {
            return fail("T", "too short for the Hankel depth and model order");
        }
        if !(self.box_lower < self.box_upper) {
            return fail("box_lower", "must be below box_upper");
        }
        if let Some(u0) = self.u0 {
            if u0 < self.box_lower || u0 > self.box_upper {
                return fail("u0", "must lie inside the box");
            }
        }
        if !(self.ref_lo <= self.ref_hi) {
            return fail("ref_lo", "must not exceed ref_hi");
        }
        if !(self.dbar >= 0.0) {
            return fail("dbar", "must be nonnegative");
        }
        if !(self.sigma >= 0.0) {
            return fail("sigma", "must be nonnegative");
        }
        if !(self.input_amplitude > 0.0) {
            return fail("input_amplitude", "must be positive");
        }
        if !(self.ridge >= 0.0) {
            return fail("ridge", "must be nonnegative");
        }
        if !(self.safety_factor >= 1.0) {
            return fail("safety_factor", "must be at least 1");
        }
        if self.variants.is_empty() {
            return fail("variants", "at least one variant is required");
        }
        if self.scenario == Scenario::Batch && self.systems == 0 {
            return fail("systems", "must be positive");
        }
        if !(self.x0_range >= 0.0) {
            return fail("x0_range", "must be nonnegative");
        }
        Ok(())
    }

    pub fn disturbance_spec(&self, kind: DisturbanceKind) -> DisturbanceSpec {
        DisturbanceSpec::from_kind(
            kind,
            self.dbar,
            self.sigma,
            self.omega,
            self.scenario.sample_time(),
            self.fixed_phase,
        )
    }

    pub fn online_disturbance(&self) -> DisturbanceSpec {
        self.disturbance_spec(self.disturbance)
    }

    pub fn fixed_box(&self) -> Result<BoxConstraint> {
        BoxConstraint::new(self.box_lower, self.box_upper, self.horizon)
    }

    /// `K = T_ini + N`.
    pub fn depth(&self) -> usize {
        self.t_ini + self.horizon
    }

    /// Canonical JSON, the input of the manifest hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
