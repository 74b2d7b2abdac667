use nalgebra::{DMatrix, DVector};

use super::state_space::{simulate_inputs, DiscreteStateSpace};
use crate::error::{dim_err, Error, Result};
use crate::linalg::gram_extreme_eigenvalues;

/// Trial-domain map `y = G u + c` over a horizon of `N` samples.
///
/// `G` holds the Markov parameters `CA^iB` on its subdiagonals and is exactly
/// zero above the diagonal; `c` is the free response `[CA; ...; CA^N] x0`
/// (plus any fixed exogenous contribution).
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedSystem {
    g: DMatrix<f64>,
    c: DVector<f64>,
    lipschitz: f64,
    strong_convexity: f64,
}

impl LiftedSystem {
    /// Builds from an explicit `(G, c)` pair, e.g. a data-driven estimate.
    pub fn from_parts(g: DMatrix<f64>, c: DVector<f64>) -> Result<Self> {
        if !g.is_square() || g.nrows() != c.len() {
            return Err(dim_err(format!(
                "G is {}x{}, c has length {}",
                g.nrows(),
                g.ncols(),
                c.len()
            )));
        }
        let (xi, l) = gram_extreme_eigenvalues(&g);
        Ok(Self {
            g,
            c,
            lipschitz: l,
            strong_convexity: xi,
        })
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    /// `lambda_max(G^T G)`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// `lambda_min(G^T G)`.
    pub fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }

    pub fn horizon(&self) -> usize {
        self.c.len()
    }

    pub fn output(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.g * u + &self.c
    }

    /// `J(u) = 1/2 ||r - (Gu + c)||^2`.
    pub fn cost(&self, u: &DVector<f64>, r: &DVector<f64>) -> f64 {
        0.5 * (r - self.output(u)).norm_squared()
    }

    /// `-G^T (r - (Gu + c))`.
    pub fn gradient(&self, u: &DVector<f64>, r: &DVector<f64>) -> DVector<f64> {
        -(self.g.tr_mul(&(r - self.output(u))))
    }

    /// `G^{-1}(r - c)` by forward substitution.
    pub fn unconstrained_optimum(&self, r: &DVector<f64>) -> Result<DVector<f64>> {
        self.g
            .solve_lower_triangular(&(r - &self.c))
            .ok_or_else(|| Error::Numerical("lifted map is singular".into()))
    }
}

/// Lifted map of input channel 0 with every other channel held at zero.
pub fn build_lifted(
    sys: &DiscreteStateSpace,
    x0: &DVector<f64>,
    horizon: usize,
) -> Result<LiftedSystem> {
    let exo = DMatrix::zeros(horizon, sys.inputs().saturating_sub(1));
    build_lifted_with_exogenous(sys, x0, horizon, &exo)
}

/// Lifted map of input channel 0; channels `1..m` follow the fixed sequences in
/// the columns of `exogenous` (row `k` = time `k`) and fold into `c`.
pub fn build_lifted_with_exogenous(
    sys: &DiscreteStateSpace,
    x0: &DVector<f64>,
    horizon: usize,
    exogenous: &DMatrix<f64>,
) -> Result<LiftedSystem> {
    if horizon == 0 {
        return Err(Error::InvalidArgument(
            "lifted horizon must be positive".into(),
        ));
    }
    if x0.len() != sys.order() {
        return Err(dim_err(format!(
            "x0 has length {}, expected {}",
            x0.len(),
            sys.order()
        )));
    }
    if exogenous.nrows() != horizon || exogenous.ncols() + 1 != sys.inputs() {
        return Err(dim_err(format!(
            "exogenous inputs must be {horizon}x{}, got {}x{}",
            sys.inputs() - 1,
            exogenous.nrows(),
            exogenous.ncols()
        )));
    }
    let cb = sys.first_markov(0);
    if cb == 0.0 {
        return Err(Error::RelativeDegree(cb));
    }
    let mut markov = Vec::with_capacity(horizon);
    let mut v = sys.input_column(0);
    for _ in 0..horizon {
        markov.push(sys.c().dot(&v.transpose()));
        v = sys.a() * v;
    }
    let g = DMatrix::from_fn(
        horizon,
        horizon,
        |i, j| if i >= j { markov[i - j] } else { 0.0 },
    );

    let mut inputs = DMatrix::zeros(horizon, sys.inputs());
    if sys.inputs() > 1 {
        inputs.columns_mut(1, sys.inputs() - 1).copy_from(exogenous);
    }
    let c = DVector::from_vec(simulate_inputs(sys, x0, &inputs)?);
    LiftedSystem::from_parts(g, c)
}
