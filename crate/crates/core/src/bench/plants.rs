use crate::error::Result;
use crate::lti::{
    c2d_zoh, feedback_loop, poly_mul, ContinuousStateSpace, DiscreteStateSpace, SampleTime,
    TransferFunction,
};

/// Fourth-order benchmark plant, `Ts` abstract.
pub fn toy_system() -> Result<DiscreteStateSpace> {
    TransferFunction::discrete(
        vec![0.7836, 0.7732, 0.1936, 0.009937],
        vec![1.0, 1.778, 0.9869, 0.2007, 0.0205],
        SampleTime::Abstract,
    )?
    .to_discrete()
}

/// One axis of the motion stage: a double integrator with a lightly damped
/// resonance / anti-resonance pair, position in mm per volt.
pub fn motion_plant() -> Result<ContinuousStateSpace> {
    let (wz, wp) = (88.5, 89.5);
    let num: Vec<f64> = [1.0 / (wz * wz), 0.1 / wz, 1.0]
        .iter()
        .map(|v| 3500.0 * v)
        .collect();
    let den = poly_mul(&[1.0, 0.0, 0.0], &[1.0 / (wp * wp), 0.1 / wp, 1.0]);
    TransferFunction::continuous(num, den)?.to_continuous()
}

/// Lead-lag position controller.
pub fn motion_controller() -> Result<ContinuousStateSpace> {
    let num: Vec<f64> = poly_mul(&[1.0, 1.9], &[1.0, 100.0])
        .iter()
        .map(|v| 10.0 * v)
        .collect();
    let den = poly_mul(&[1.0, 1.15], &[1.0, 200.0]);
    TransferFunction::continuous(num, den)?.to_continuous()
}

/// Closed motion loop sampled with zero-order hold; inputs `[u, r]`.
pub fn motion_closed_loop(ts: f64) -> Result<DiscreteStateSpace> {
    c2d_zoh(&feedback_loop(&motion_plant()?, &motion_controller()?)?, ts)
}
