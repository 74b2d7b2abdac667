use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::gram_extreme_eigenvalues;
use crate::lti::BoxConstraint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Classical,
    Fast,
    Hybrid,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Classical, Variant::Fast, Variant::Hybrid];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Classical => "classical",
            Variant::Fast => "fast",
            Variant::Hybrid => "hybrid",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `-G~^T e`.
pub fn inexact_gradient(g_tilde: &DMatrix<f64>, e: &DVector<f64>) -> DVector<f64> {
    -g_tilde.tr_mul(e)
}

pub fn project_box(v: &DVector<f64>, bounds: &BoxConstraint) -> DVector<f64> {
    bounds.project(v)
}

#[derive(Clone, Debug)]
pub struct IlcConfig {
    pub variant: Variant,
    pub g_tilde: DMatrix<f64>,
    pub lipschitz: f64,
    pub bounds: BoxConstraint,
    /// Number of updates `M`; a run records trials `0..=M`.
    pub trials: usize,
    /// Moving-average window `W` of the hybrid switch test.
    pub window: usize,
    pub u0: DVector<f64>,
}

impl IlcConfig {
    /// Step constant `lambda_max(G~^T G~)`, 20 trials, window 5.
    pub fn new(
        variant: Variant,
        g_tilde: DMatrix<f64>,
        bounds: BoxConstraint,
        u0: DVector<f64>,
    ) -> Self {
        let (_, lipschitz) = gram_extreme_eigenvalues(&g_tilde);
        Self {
            variant,
            g_tilde,
            lipschitz,
            bounds,
            trials: 20,
            window: 5,
            u0,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Self {
        self.lipschitz = lipschitz;
        self
    }

    /// Multiplies the step constant by `kappa >= 1`.
    pub fn with_safety_factor(mut self, kappa: f64) -> Self {
        self.lipschitz *= kappa;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn horizon(&self) -> usize {
        self.u0.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.u0.len();
        if self.g_tilde.shape() != (n, n) || self.bounds.len() != n {
            return Err(Error::Dimension(format!(
                "G~ is {}x{}, box has length {}, u0 has length {n}",
                self.g_tilde.nrows(),
                self.g_tilde.ncols(),
                self.bounds.len()
            )));
        }
        if !(self.lipschitz > 0.0) || !self.lipschitz.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "step constant L = {} must be positive",
                self.lipschitz
            )));
        }
        if self.window == 0 {
            return Err(Error::InvalidArgument("window W must be at least 1".into()));
        }
        if !self.bounds.contains(&self.u0) {
            return Err(Error::InvalidArgument("u0 lies outside the box".into()));
        }
        Ok(())
    }
}

/// Solver state before trial `j`'s update.
#[derive(Clone, Debug, PartialEq)]
pub struct IlcState {
    pub j: usize,
    pub u: DVector<f64>,
    /// `sum_{i <= j-1} (i + 1) * grad_i`.
    pub z: DVector<f64>,
    pub switched: bool,
    pub switch_index: Option<usize>,
    /// `||e_i||` for the trials observed so far.
    pub error_norms: Vec<f64>,
}

impl IlcState {
    pub fn new(u0: DVector<f64>) -> Self {
        let n = u0.len();
        Self {
            j: 0,
            u: u0,
            z: DVector::zeros(n),
            switched: false,
            switch_index: None,
            error_norms: Vec::new(),
        }
    }
}

/// Intermediate points of a fast update.
#[derive(Clone, Debug, PartialEq)]
pub struct FastIterates {
    pub mu: DVector<f64>,
    pub nu: DVector<f64>,
}

/// `u+ = P(u - grad / L)`.
pub fn classical_step(state: &IlcState, grad: &DVector<f64>, config: &IlcConfig) -> IlcState {
    let u = config.bounds.project(&(&state.u - grad / config.lipschitz));
    IlcState {
        j: state.j + 1,
        u,
        ..state.clone()
    }
}

/// Accelerated update with the gradient history folded into `z`.
pub fn fast_step(
    state: &IlcState,
    grad: &DVector<f64>,
    config: &IlcConfig,
) -> (FastIterates, IlcState) {
    let l = config.lipschitz;
    let jf = state.j as f64;
    let mu = config.bounds.project(&(&state.u - grad / l));
    let z = &state.z + grad * (jf + 1.0);
    let nu = config.bounds.project(&(&config.u0 - &z / (2.0 * l)));
    // a convex combination of box points; the clamp only removes rounding
    let u = config
        .bounds
        .project(&(&nu * (2.0 / (jf + 3.0)) + &mu * ((jf + 1.0) / (jf + 3.0))));
    let next = IlcState {
        j: state.j + 1,
        u,
        z,
        ..state.clone()
    };
    (FastIterates { mu, nu }, next)
}

fn window_mean(norms: &[f64]) -> f64 {
    norms.iter().sum::<f64>() / norms.len() as f64
}

/// Fast updates until the windowed mean of `||e||` rises, classical after.
/// `state.error_norms` must already hold `||e_j||`.
pub fn hybrid_step(state: &IlcState, grad: &DVector<f64>, config: &IlcConfig) -> IlcState {
    let mut state = state.clone();
    let (j, w) = (state.j, config.window);
    if !state.switched && j >= w && state.error_norms.len() > j {
        let current = window_mean(&state.error_norms[j + 1 - w..=j]);
        let previous = window_mean(&state.error_norms[j - w..j]);
        if current > previous {
            state.switched = true;
            state.switch_index = Some(j);
        }
    }
    if state.switched {
        classical_step(&state, grad, config)
    } else {
        fast_step(&state, grad, config).1
    }
}

/// Records `||e_j||` and applies `config.variant`.
pub fn advance(state: &IlcState, e: &DVector<f64>, config: &IlcConfig) -> IlcState {
    let mut observed = state.clone();
    observed.error_norms.push(e.norm());
    let grad = inexact_gradient(&config.g_tilde, e);
    match config.variant {
        Variant::Classical => classical_step(&observed, &grad, config),
        Variant::Fast => fast_step(&observed, &grad, config).1,
        Variant::Hybrid => hybrid_step(&observed, &grad, config),
    }
}
