use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::DVector;

use super::oracle::TrialOracle;
use super::step::{advance, IlcConfig, IlcState, Variant};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct IlcRecord {
    pub j: usize,
    pub u: DVector<f64>,
    pub e_norm: f64,
    pub eps_norm: f64,
    /// Switch flag in force when `u` was applied.
    pub switched: bool,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct IlcRun {
    pub variant: Variant,
    pub records: Vec<IlcRecord>,
    pub switch_index: Option<usize>,
}

impl IlcRun {
    pub fn eps_norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.eps_norm).collect()
    }

    pub fn e_norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.e_norm).collect()
    }

    /// `||u_j - u*||` per trial.
    pub fn input_errors(&self, u_star: &DVector<f64>) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| (&r.u - u_star).norm())
            .collect()
    }

    pub fn final_record(&self) -> &IlcRecord {
        self.records
            .last()
            .expect("a run always holds the initial trial")
    }

    /// CSV `j,e_norm,eps_norm,u_err_norm,sf,variant`; `u_err_norm` is blank
    /// without `u_star`.
    pub fn write_csv<W: Write>(&self, out: W, u_star: Option<&DVector<f64>>) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["j", "e_norm", "eps_norm", "u_err_norm", "sf", "variant"])?;
        for r in &self.records {
            let u_err = u_star
                .map(|s| format!("{:e}", (&r.u - s).norm()))
                .unwrap_or_default();
            writer.write_record([
                r.j.to_string(),
                format!("{:e}", r.e_norm),
                format!("{:e}", r.eps_norm),
                u_err,
                u8::from(r.switched).to_string(),
                self.variant.name().to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>, u_star: Option<&DVector<f64>>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?, u_star)
    }
}

/// Applies `u_0`, then `M` updates, measuring after each: `M + 1` records.
pub fn run(oracle: &dyn TrialOracle, config: &IlcConfig) -> Result<IlcRun> {
    config.validate()?;
    let start = Instant::now();
    let mut state = IlcState::new(config.u0.clone());
    let mut records = Vec::with_capacity(config.trials + 1);
    for j in 0..=config.trials {
        let m = oracle.measure(j, &state.u)?;
        records.push(IlcRecord {
            j,
            u: state.u.clone(),
            e_norm: m.inexact.norm(),
            eps_norm: m.exact.norm(),
            switched: state.switched,
            elapsed: start.elapsed(),
        });
        if j < config.trials {
            state = advance(&state, &m.inexact, config);
        }
    }
    Ok(IlcRun {
        variant: config.variant,
        records,
        switch_index: state.switch_index,
    })
}
