use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lti::{simulate_inputs, DiscreteStateSpace};

/// One offline trajectory `u(0..=T)`, `y(0..=T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OfflineData {
    u: Vec<f64>,
    y: Vec<f64>,
    perturbed: bool,
}

#[derive(Serialize, Deserialize)]
struct Row {
    k: usize,
    u: f64,
    y: f64,
}

impl OfflineData {
    pub fn new(u: Vec<f64>, y: Vec<f64>, perturbed: bool) -> Result<Self> {
        if u.len() != y.len() {
            return Err(Error::Dimension(format!(
                "u has {} samples, y has {}",
                u.len(),
                y.len()
            )));
        }
        if u.len() < 2 {
            return Err(Error::InsufficientData(
                "offline data needs at least two samples".into(),
            ));
        }
        Ok(Self { u, y, perturbed })
    }

    /// Runs `sys` from `x0` on `u(0..=T)` through input channel 0 (other
    /// channels held at zero); `y(0) = C x0` and `y(k)` follows the trial
    /// convention. `d`, if given, is added to every output sample.
    pub fn collect(
        sys: &DiscreteStateSpace,
        x0: &DVector<f64>,
        u: Vec<f64>,
        d: Option<&[f64]>,
    ) -> Result<Self> {
        if let Some(d) = d {
            if d.len() != u.len() {
                return Err(Error::Dimension(format!(
                    "disturbance has {} samples, u has {}",
                    d.len(),
                    u.len()
                )));
            }
        }
        let t = u.len() - 1;
        let mut y = Vec::with_capacity(u.len());
        y.push(sys.c().dot(&x0.transpose()));
        let mut inputs = DMatrix::zeros(t, sys.inputs());
        inputs.column_mut(0).copy_from_slice(&u[..t]);
        y.extend(simulate_inputs(sys, x0, &inputs)?);
        if let Some(d) = d {
            y.iter_mut().zip(d).for_each(|(yk, dk)| *yk += dk);
        }
        let perturbed = d.is_some_and(|d| d.iter().any(|&v| v != 0.0));
        Self::new(u, y, perturbed)
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn is_perturbed(&self) -> bool {
        self.perturbed
    }

    /// `T`, one less than the number of samples.
    pub fn len_t(&self) -> usize {
        self.u.len() - 1
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let mut u = Vec::new();
        let mut y = Vec::new();
        for (i, row) in reader.deserialize::<Row>().enumerate() {
            let row = row?;
            if row.k != i {
                return Err(Error::InvalidArgument(format!(
                    "expected k = {i}, found {}",
                    row.k
                )));
            }
            u.push(row.u);
            y.push(row.y);
        }
        // a file carries no noise marker
        Self::new(u, y, true)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        for (k, (&u, &y)) in self.u.iter().zip(&self.y).enumerate() {
            writer.serialize(Row { k, u, y })?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Dense matrix as CSV with header `c0,c1,...`.
pub fn write_matrix_csv(path: impl AsRef<Path>, m: &DMatrix<f64>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record((0..m.ncols()).map(|j| format!("c{j}")))?;
    for i in 0..m.nrows() {
        writer.write_record(m.row(i).iter().map(|v| format!("{v:e}")))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let mut reader = csv::Reader::from_path(path)?;
    let cols = reader.headers()?.len();
    let mut values = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record?;
        for field in record.iter() {
            values.push(
                field.trim().parse::<f64>().map_err(|e| {
                    Error::InvalidArgument(format!("bad matrix entry {field:?}: {e}"))
                })?,
            );
        }
        rows += 1;
    }
    if values.len() != rows * cols {
        return Err(Error::Dimension("ragged matrix CSV".into()));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}
