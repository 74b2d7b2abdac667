use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lti::{simulate_inputs, DiscreteStateSpace, LiftedSystem};
use crate::signals::DisturbanceSpec;

/// Errors returned after applying an input for one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    /// `r - (y + d)`, what the learning law sees.
    pub inexact: DVector<f64>,
    /// `r - y`, for evaluation only.
    pub exact: DVector<f64>,
}

/// Something that executes one trial. Trials are indexed so that fresh
/// disturbances are reproducible and `measure` stays free of hidden state.
pub trait TrialOracle {
    fn reference(&self) -> &DVector<f64>;

    fn measure(&self, trial: usize, u: &DVector<f64>) -> Result<Measurement>;

    fn horizon(&self) -> usize {
        self.reference().len()
    }
}

fn finish(
    r: &DVector<f64>,
    y: DVector<f64>,
    disturbance: &DisturbanceSpec,
    seed: u64,
    trial: usize,
) -> Measurement {
    let d = DVector::from_vec(disturbance.generate_trial(r.len(), seed, trial));
    let exact = r - &y;
    let inexact = &exact - d;
    Measurement { inexact, exact }
}

/// Simulates the plant from the same `x0` every trial. Extra input channels,
/// if any, replay fixed sequences (e.g. the reference of a feedback loop).
#[derive(Clone, Debug)]
pub struct PlantOracle {
    sys: DiscreteStateSpace,
    x0: DVector<f64>,
    reference: DVector<f64>,
    exogenous: DMatrix<f64>,
    disturbance: DisturbanceSpec,
    seed: u64,
}

impl PlantOracle {
    pub fn new(
        sys: DiscreteStateSpace,
        x0: DVector<f64>,
        reference: DVector<f64>,
        disturbance: DisturbanceSpec,
        seed: u64,
    ) -> Result<Self> {
        let exogenous = DMatrix::zeros(reference.len(), sys.inputs() - 1);
        Self::with_exogenous(sys, x0, reference, exogenous, disturbance, seed)
    }

    /// `exogenous` holds channels `1..m`, one row per sample.
    pub fn with_exogenous(
        sys: DiscreteStateSpace,
        x0: DVector<f64>,
        reference: DVector<f64>,
        exogenous: DMatrix<f64>,
        disturbance: DisturbanceSpec,
        seed: u64,
    ) -> Result<Self> {
        disturbance.validate()?;
        if x0.len() != sys.order() {
            return Err(Error::Dimension(format!(
                "x0 has length {}, system order is {}",
                x0.len(),
                sys.order()
            )));
        }
        if exogenous.nrows() != reference.len() || exogenous.ncols() + 1 != sys.inputs() {
            return Err(Error::Dimension(
                "exogenous inputs do not match the system and horizon".into(),
            ));
        }
        Ok(Self {
            sys,
            x0,
            reference,
            exogenous,
            disturbance,
            seed,
        })
    }
}

impl TrialOracle for PlantOracle {
    fn reference(&self) -> &DVector<f64> {
        &self.reference
    }

    fn measure(&self, trial: usize, u: &DVector<f64>) -> Result<Measurement> {
        let n = self.reference.len();
        if u.len() != n {
            return Err(Error::Dimension(format!(
                "input has length {}, horizon is {n}",
                u.len()
            )));
        }
        let mut inputs = DMatrix::zeros(n, self.sys.inputs());
        inputs.set_column(0, u);
        if self.exogenous.ncols() > 0 {
            inputs
                .columns_mut(1, self.exogenous.ncols())
                .copy_from(&self.exogenous);
        }
        let y = DVector::from_vec(simulate_inputs(&self.sys, &self.x0, &inputs)?);
        Ok(finish(
            &self.reference,
            y,
            &self.disturbance,
            self.seed,
            trial,
        ))
    }
}

/// Evaluates `y = G u + c` directly.
#[derive(Clone, Debug)]
pub struct LiftedOracle {
    lifted: LiftedSystem,
    reference: DVector<f64>,
    disturbance: DisturbanceSpec,
    seed: u64,
}

impl LiftedOracle {
    pub fn new(
        lifted: LiftedSystem,
        reference: DVector<f64>,
        disturbance: DisturbanceSpec,
        seed: u64,
    ) -> Result<Self> {
        disturbance.validate()?;
        if reference.len() != lifted.horizon() {
            return Err(Error::Dimension(
                "reference length differs from the lifted horizon".into(),
            ));
        }
        Ok(Self {
            lifted,
            reference,
            disturbance,
            seed,
        })
    }

    pub fn lifted(&self) -> &LiftedSystem {
        &self.lifted
    }
}

impl TrialOracle for LiftedOracle {
    fn reference(&self) -> &DVector<f64> {
        &self.reference
    }

    fn measure(&self, trial: usize, u: &DVector<f64>) -> Result<Measurement> {
        if u.len() != self.reference.len() {
            return Err(Error::Dimension(format!(
                "input has length {}, horizon is {}",
                u.len(),
                self.reference.len()
            )));
        }
        let y = self.lifted.output(u);
        Ok(finish(
            &self.reference,
            y,
            &self.disturbance,
            self.seed,
            trial,
        ))
    }
}
