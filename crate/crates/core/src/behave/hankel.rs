use nalgebra::DMatrix;

use super::data::OfflineData;
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, singular_values};

/// Depth-`depth` Hankel matrix, entry `(i, j) = w[i + j]`.
pub fn hankel(w: &[f64], depth: usize) -> Result<DMatrix<f64>> {
    if depth == 0 || depth > w.len() {
        return Err(Error::InvalidArgument(format!(
            "Hankel depth {depth} does not fit a sequence of length {}",
            w.len()
        )));
    }
    let cols = w.len() - depth + 1;
    Ok(DMatrix::from_fn(depth, cols, |i, j| w[i + j]))
}

/// Past/future blocks of the depth-`K+1` Hankel matrices with the one-row
/// shift blocks dropped: inputs cover `u(0..T-1)`, outputs `y(1..T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HankelBlocks {
    pub up: DMatrix<f64>,
    pub uf: DMatrix<f64>,
    pub yp: DMatrix<f64>,
    pub yf: DMatrix<f64>,
}

impl HankelBlocks {
    pub fn t_ini(&self) -> usize {
        self.up.nrows()
    }

    pub fn horizon(&self) -> usize {
        self.uf.nrows()
    }

    /// `K = T_ini + N`.
    pub fn depth(&self) -> usize {
        self.t_ini() + self.horizon()
    }

    pub fn columns(&self) -> usize {
        self.up.ncols()
    }

    /// `[Up; Uf]`.
    pub fn inputs(&self) -> DMatrix<f64> {
        stack(&[&self.up, &self.uf])
    }

    /// `[Yp; Yf]`.
    pub fn outputs(&self) -> DMatrix<f64> {
        stack(&[&self.yp, &self.yf])
    }

    /// `[Up; Yp; Uf; Yf]`.
    pub fn stacked(&self) -> DMatrix<f64> {
        stack(&[&self.up, &self.yp, &self.uf, &self.yf])
    }

    fn with_outputs(&self, y: DMatrix<f64>) -> Self {
        let t_ini = self.t_ini();
        Self {
            up: self.up.clone(),
            uf: self.uf.clone(),
            yp: y.rows(0, t_ini).into_owned(),
            yf: y.rows(t_ini, self.horizon()).into_owned(),
        }
    }
}

pub(crate) fn stack(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let cols = blocks[0].ncols();
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.rows_mut(r, b.nrows()).copy_from(*b);
        r += b.nrows();
    }
    out
}

pub fn partition(data: &OfflineData, t_ini: usize, horizon: usize) -> Result<HankelBlocks> {
    if t_ini == 0 || horizon == 0 {
        return Err(Error::InvalidArgument(
            "T_ini and N must be positive".into(),
        ));
    }
    let k = t_ini + horizon;
    let t = data.len_t();
    if t < k {
        return Err(Error::InsufficientData(format!(
            "T = {t} is shorter than K = {k}"
        )));
    }
    let hu = hankel(data.u(), k + 1)?;
    let hy = hankel(data.y(), k + 1)?;
    Ok(HankelBlocks {
        up: hu.rows(0, t_ini).into_owned(),
        uf: hu.rows(t_ini, horizon).into_owned(),
        yp: hy.rows(1, t_ini).into_owned(),
        yf: hy.rows(t_ini + 1, horizon).into_owned(),
    })
}

/// `rank [Up; Yp; Uf; Yf] == K + n`.
pub fn rank_condition(blocks: &HankelBlocks, n: usize) -> bool {
    numerical_rank(&blocks.stacked()) == blocks.depth() + n
}

/// Denoised blocks plus the spectrum of the output component orthogonal to
/// the input row space.
#[derive(Clone, Debug, PartialEq)]
pub struct Denoised {
    pub blocks: HankelBlocks,
    pub singular_values: Vec<f64>,
    pub order: usize,
}

/// Rank-`K+n` approximation of `[U; Y]` that keeps `U` fixed: the output
/// part inside the input row space is kept, the orthogonal remainder is
/// truncated to its leading `n` singular triplets.
pub fn denoise(blocks: &HankelBlocks, n: usize) -> Result<Denoised> {
    let k = blocks.depth();
    let m = blocks.columns();
    if m <= k {
        return Err(Error::InsufficientData(format!(
            "denoising needs more Hankel columns than rows: T - K + 1 = {m}, K = {k}"
        )));
    }
    if n > k {
        return Err(Error::InvalidArgument(format!("order {n} exceeds K = {k}")));
    }
    let ut = blocks.inputs().transpose();
    if numerical_rank(&ut) < k {
        return Err(Error::NotPersistentlyExciting(format!(
            "input Hankel block has rank below K = {k}"
        )));
    }
    let q1 = ut.qr().q();
    let yt = blocks.outputs().transpose();
    let inside = &q1 * q1.tr_mul(&yt);
    let residual = &yt - &inside;
    let svd = residual.clone().svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Numerical("SVD of the output residual failed".into())),
    };
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut truncated = DMatrix::zeros(m, k);
    for &i in order.iter().take(n) {
        let s = svd.singular_values[i];
        truncated += (u.column(i) * s) * v_t.row(i);
    }
    let singular_values = singular_values(&residual);
    let ybar = (inside + truncated).transpose();
    Ok(Denoised {
        blocks: blocks.with_outputs(ybar),
        singular_values,
        order: n,
    })
}
