//! Projected-gradient ILC with an inexact gradient oracle: classical, fast
//! (accelerated) and hybrid update laws, trial oracles, and computable bounds.

mod bounds;
mod oracle;
mod run;
mod step;

pub use bounds::{
    classical_envelope, envelopes, fast_envelope, j_star, jbar, optimal_input, oracle_bounds,
    BoundReport, EnvelopeRow, JBar, JBarKind, OracleBounds, JBAR_EXACT_MAX_N,
};
pub use oracle::{LiftedOracle, Measurement, PlantOracle, TrialOracle};
pub use run::{run, IlcRecord, IlcRun};
pub use step::{
    advance, classical_step, fast_step, hybrid_step, inexact_gradient, project_box, FastIterates,
    IlcConfig, IlcState, Variant,
};
