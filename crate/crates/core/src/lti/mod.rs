//! LTI plumbing: transfer functions, state-space models, zero-order hold,
//! simulation in the trial convention `y(1..N)` from `u(0..N-1)`, and the
//! lifted trial-domain map.

mod config;
mod lifted;
mod random;
mod state_space;
mod transfer;

pub use config::{DomainTag, SsDefinition, SystemDefinition, TfDefinition};
pub use lifted::{build_lifted, build_lifted_with_exogenous, LiftedSystem};
pub use random::{
    is_admissible, random_system, random_system_with_budget, DEFAULT_SAMPLING_BUDGET, POLE_RADIUS,
};
pub use state_space::{
    c2d_zoh, feedback_loop, simulate, simulate_inputs, ContinuousStateSpace, DiscreteStateSpace,
    SampleTime,
};
pub use transfer::{poly_eval, poly_mul, tf_to_ss, Domain, Realization, TransferFunction};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elementwise input box `[lower, upper]^len`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxConstraint {
    lower: f64,
    upper: f64,
    len: usize,
}

impl BoxConstraint {
    pub fn new(lower: f64, upper: f64, len: usize) -> Result<Self> {
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "box needs lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper, len })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// `sup ||a - b||_2` over the box.
    pub fn diameter(&self) -> f64 {
        (self.len as f64).sqrt() * (self.upper - self.lower)
    }

    pub fn contains(&self, v: &DVector<f64>) -> bool {
        v.len() == self.len && v.iter().all(|&x| x >= self.lower && x <= self.upper)
    }

    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        v.map(|x| x.clamp(self.lower, self.upper))
    }
}
