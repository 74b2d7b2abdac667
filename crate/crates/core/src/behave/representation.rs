use nalgebra::{DMatrix, DVector};

use super::data::OfflineData;
use super::hankel::{denoise, partition, stack, HankelBlocks};
use crate::error::{Error, Result};
use crate::linalg::{lower_triangular_part, pinv};

/// Data-driven lifted map and the artifacts it was built from.
#[derive(Clone, Debug)]
pub struct Representation {
    g: DMatrix<f64>,
    phi: DMatrix<f64>,
    psi: DMatrix<f64>,
    yf_bar: DMatrix<f64>,
    t_ini: usize,
    order: Option<usize>,
    singular_values: Vec<f64>,
}

impl Representation {
    /// Causal map `G~`, lower triangular.
    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// Pseudoinverse columns aligned with the future input.
    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    /// Pseudoinverse columns aligned with `(u_ini, y_ini)`.
    pub fn psi(&self) -> &DMatrix<f64> {
        &self.psi
    }

    pub fn yf_bar(&self) -> &DMatrix<f64> {
        &self.yf_bar
    }

    pub fn t_ini(&self) -> usize {
        self.t_ini
    }

    pub fn horizon(&self) -> usize {
        self.g.nrows()
    }

    /// Truncation order, `None` when the outputs were used as measured.
    pub fn order(&self) -> Option<usize> {
        self.order
    }

    /// Spectrum discarded from during denoising (empty without denoising).
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// `Yf_bar (Phi u + Psi [u_ini; y_ini])`: the next `N` outputs after an
    /// initial window of `T_ini` inputs and the outputs they produced.
    pub fn predict(&self, u_ini: &[f64], y_ini: &[f64], u: &[f64]) -> Result<DVector<f64>> {
        if u_ini.len() != self.t_ini || y_ini.len() != self.t_ini || u.len() != self.horizon() {
            return Err(Error::Dimension(format!(
                "prediction needs {} initial samples and {} future inputs",
                self.t_ini,
                self.horizon()
            )));
        }
        let ini = DVector::from_iterator(2 * self.t_ini, u_ini.iter().chain(y_ini).copied());
        let alpha = &self.phi * DVector::from_column_slice(u) + &self.psi * ini;
        Ok(&self.yf_bar * alpha)
    }
}

/// Zeros the strictly upper triangle.
pub fn causal_project(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "causal projection needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(lower_triangular_part(m))
}

/// Representation from (possibly denoised) blocks.
pub fn build_representation(blocks: &HankelBlocks) -> Result<Representation> {
    assemble(blocks, None, Vec::new())
}

fn assemble(
    blocks: &HankelBlocks,
    order: Option<usize>,
    singular_values: Vec<f64>,
) -> Result<Representation> {
    let t_ini = blocks.t_ini();
    let horizon = blocks.horizon();
    let p = pinv(&stack(&[&blocks.up, &blocks.yp, &blocks.uf]))?;
    let psi = p.columns(0, 2 * t_ini).into_owned();
    let phi = p.columns(2 * t_ini, horizon).into_owned();
    let g = causal_project(&(&blocks.yf * &phi))?;
    Ok(Representation {
        g,
        phi,
        psi,
        yf_bar: blocks.yf.clone(),
        t_ini,
        order,
        singular_values,
    })
}

/// Partition, optionally denoise to order `n`, and build.
pub fn identify(
    data: &OfflineData,
    t_ini: usize,
    horizon: usize,
    order: Option<usize>,
) -> Result<Representation> {
    let blocks = partition(data, t_ini, horizon)?;
    match order {
        Some(n) => {
            let d = denoise(&blocks, n)?;
            assemble(&d.blocks, Some(n), d.singular_values)
        }
        None => build_representation(&blocks),
    }
}

/// `||G u - G~ u|| / ||G u||`.
pub fn relative_error(g: &DMatrix<f64>, g_tilde: &DMatrix<f64>, u: &DVector<f64>) -> Result<f64> {
    if g.shape() != g_tilde.shape() || g.ncols() != u.len() {
        return Err(Error::Dimension(
            "relative error operands disagree in size".into(),
        ));
    }
    let y = g * u;
    let denom = y.norm();
    if denom == 0.0 {
        return Err(Error::ZeroEnergy("true output"));
    }
    Ok((y - g_tilde * u).norm() / denom)
}
