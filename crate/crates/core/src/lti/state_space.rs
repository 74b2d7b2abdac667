use nalgebra::{Complex, DMatrix, DVector, RowDVector};
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::linalg::numerical_rank;

/// Sample time of a discrete system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SampleTime {
    /// Unitless step; treated as 1 s wherever a physical time is required.
    Abstract,
    Seconds(f64),
}

impl SampleTime {
    pub fn seconds(&self) -> f64 {
        match *self {
            SampleTime::Abstract => 1.0,
            SampleTime::Seconds(ts) => ts,
        }
    }
}

/// Shared storage for single-output state-space models with `m` inputs.
#[derive(Clone, Debug, PartialEq)]
struct Matrices {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: RowDVector<f64>,
    d: RowDVector<f64>,
}

impl Matrices {
    fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: RowDVector<f64>,
        d: RowDVector<f64>,
    ) -> Result<Self> {
        let n = a.nrows();
        if n == 0 {
            return Err(dim_err("state dimension must be at least 1"));
        }
        if a.ncols() != n {
            return Err(dim_err(format!(
                "A must be square, got {}x{}",
                n,
                a.ncols()
            )));
        }
        if b.nrows() != n {
            return Err(dim_err(format!("B has {} rows, expected {n}", b.nrows())));
        }
        if b.ncols() == 0 {
            return Err(dim_err("B must have at least one input column"));
        }
        if c.len() != n {
            return Err(dim_err(format!("C has {} columns, expected {n}", c.len())));
        }
        if d.len() != b.ncols() {
            return Err(dim_err(format!(
                "D has {} entries, expected {}",
                d.len(),
                b.ncols()
            )));
        }
        let finite = a
            .iter()
            .chain(b.iter())
            .chain(c.iter())
            .chain(d.iter())
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidArgument(
                "state-space matrices contain non-finite values".into(),
            ));
        }
        Ok(Self { a, b, c, d })
    }

    fn response(&self, point: Complex<f64>, input: usize) -> Result<Complex<f64>> {
        if input >= self.b.ncols() {
            return Err(dim_err(format!(
                "input {input} out of range ({} inputs)",
                self.b.ncols()
            )));
        }
        let n = self.a.nrows();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let diag = if i == j {
                point
            } else {
                Complex::new(0.0, 0.0)
            };
            diag - Complex::new(self.a[(i, j)], 0.0)
        });
        let rhs = DVector::from_fn(n, |i, _| Complex::new(self.b[(i, input)], 0.0));
        let x = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical(format!("resolvent singular at {point}")))?;
        let cx: Complex<f64> = (0..n).map(|i| x[i] * self.c[i]).sum();
        Ok(cx + self.d[input])
    }
}

macro_rules! common_accessors {
    () => {
        pub fn a(&self) -> &DMatrix<f64> {
            &self.m.a
        }
        pub fn b(&self) -> &DMatrix<f64> {
            &self.m.b
        }
        pub fn c(&self) -> &RowDVector<f64> {
            &self.m.c
        }
        pub fn d(&self) -> &RowDVector<f64> {
            &self.m.d
        }
        /// State dimension.
        pub fn order(&self) -> usize {
            self.m.a.nrows()
        }
        pub fn inputs(&self) -> usize {
            self.m.b.ncols()
        }
        pub fn input_column(&self, input: usize) -> DVector<f64> {
            self.m.b.column(input).into_owned()
        }
    };
}

/// Continuous-time single-output LTI system `x' = Ax + Bu`, `y = Cx + Du`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousStateSpace {
    m: Matrices,
}

impl ContinuousStateSpace {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: RowDVector<f64>,
        d: RowDVector<f64>,
    ) -> Result<Self> {
        Ok(Self {
            m: Matrices::new(a, b, c, d)?,
        })
    }

    pub fn siso(a: DMatrix<f64>, b: DVector<f64>, c: RowDVector<f64>, d: f64) -> Result<Self> {
        let nb = b.len();
        Self::new(
            a,
            DMatrix::from_column_slice(nb, 1, b.as_slice()),
            c,
            RowDVector::from_element(1, d),
        )
    }

    common_accessors!();

    /// Transfer function from `input` evaluated at the Laplace point `s`.
    pub fn freq_response(&self, s: Complex<f64>, input: usize) -> Result<Complex<f64>> {
        self.m.response(s, input)
    }

    /// Continuous eigenvalues of `A`.
    pub fn poles(&self) -> Vec<Complex<f64>> {
        self.m.a.complex_eigenvalues().iter().copied().collect()
    }
}

/// Discrete-time single-output LTI system `x(k+1) = Ax(k) + Bu(k)`, `y(k) = Cx(k) + Du(k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteStateSpace {
    m: Matrices,
    sample_time: SampleTime,
}

impl DiscreteStateSpace {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: RowDVector<f64>,
        d: RowDVector<f64>,
        sample_time: SampleTime,
    ) -> Result<Self> {
        if let SampleTime::Seconds(ts) = sample_time {
            if !(ts > 0.0 && ts.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "sample time must be positive, got {ts}"
                )));
            }
        }
        Ok(Self {
            m: Matrices::new(a, b, c, d)?,
            sample_time,
        })
    }

    pub fn siso(
        a: DMatrix<f64>,
        b: DVector<f64>,
        c: RowDVector<f64>,
        d: f64,
        sample_time: SampleTime,
    ) -> Result<Self> {
        let nb = b.len();
        Self::new(
            a,
            DMatrix::from_column_slice(nb, 1, b.as_slice()),
            c,
            RowDVector::from_element(1, d),
            sample_time,
        )
    }

    common_accessors!();

    pub fn sample_time(&self) -> SampleTime {
        self.sample_time
    }

    /// Transfer function from `input` evaluated at the shift point `z`.
    pub fn freq_response(&self, z: Complex<f64>, input: usize) -> Result<Complex<f64>> {
        self.m.response(z, input)
    }

    pub fn poles(&self) -> Vec<Complex<f64>> {
        self.m.a.complex_eigenvalues().iter().copied().collect()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.poles().iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// `CB` for the given input channel.
    pub fn first_markov(&self, input: usize) -> f64 {
        (&self.m.c * self.m.b.column(input))[0]
    }

    /// Rank test on `[B AB ... A^{n-1}B]` for one input channel.
    pub fn is_controllable(&self, input: usize) -> bool {
        let n = self.order();
        let mut ctrb = DMatrix::zeros(n, n);
        let mut v = self.input_column(input);
        for k in 0..n {
            ctrb.set_column(k, &v);
            v = &self.m.a * v;
        }
        numerical_rank(&ctrb) == n
    }

    /// Lag (observability index): the smallest `l` with `rank [C; CA; ...; CA^{l-1}] = n`.
    /// `None` when the pair `(A, C)` is unobservable.
    pub fn lag(&self) -> Option<usize> {
        let n = self.order();
        let mut rows: Vec<RowDVector<f64>> = Vec::with_capacity(n);
        let mut r = self.m.c.clone();
        for l in 1..=n {
            rows.push(r.clone());
            let obs = DMatrix::from_rows(&rows);
            if numerical_rank(&obs) == n {
                return Some(l);
            }
            r = &r * &self.m.a;
        }
        None
    }

    /// Finite transmission zeros for the input channel of a relative-degree-one,
    /// strictly proper system: the spectrum of `(I - B(CB)^{-1}C) A` with its
    /// structural zero eigenvalue removed.
    pub fn transmission_zeros(&self, input: usize) -> Result<Vec<Complex<f64>>> {
        let cb = self.first_markov(input);
        if cb == 0.0 {
            return Err(Error::RelativeDegree(cb));
        }
        if self.m.d[input] != 0.0 {
            return Err(Error::Feedthrough(self.m.d[input]));
        }
        let b = self.input_column(input);
        let n = self.order();
        let proj = DMatrix::identity(n, n) - (&b * &self.m.c) / cb;
        let az = proj * &self.m.a;
        let mut eig: Vec<Complex<f64>> = az.complex_eigenvalues().iter().copied().collect();
        // C is a left null vector of `az`, so exactly one eigenvalue is structural.
        let idx = eig
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
            .map(|(i, _)| i)
            .expect("order >= 1");
        eig.remove(idx);
        Ok(eig)
    }
}

/// Closes the loop `e = r - y`, `plant_in = u + K e` around a SISO plant and
/// controller, returning a two-input system with inputs `[u, r]` and output `y`.
///
/// From `u` it realizes `P / (1 + PK)` and from `r` it realizes `PK / (1 + PK)`.
pub fn feedback_loop(
    plant: &ContinuousStateSpace,
    controller: &ContinuousStateSpace,
) -> Result<ContinuousStateSpace> {
    if plant.inputs() != 1 || controller.inputs() != 1 {
        return Err(dim_err("feedback_loop expects SISO plant and controller"));
    }
    let dp = plant.d()[0];
    let dk = controller.d()[0];
    let den = 1.0 + dp * dk;
    if den.abs() < 1e-12 {
        return Err(Error::AlgebraicLoop(den));
    }
    let s = 1.0 / den;
    let (np, nk) = (plant.order(), controller.order());
    let n = np + nk;
    let (ap, bp, cp) = (plant.a(), plant.input_column(0), plant.c());
    let (ak, bk, ck) = (controller.a(), controller.input_column(0), controller.c());

    let mut a = DMatrix::zeros(n, n);
    a.view_mut((0, 0), (np, np))
        .copy_from(&(ap - (&bp * cp) * (s * dk)));
    a.view_mut((0, np), (np, nk)).copy_from(&((&bp * ck) * s));
    a.view_mut((np, 0), (nk, np))
        .copy_from(&((&bk * cp) * (-s)));
    a.view_mut((np, np), (nk, nk))
        .copy_from(&(ak - (&bk * ck) * (s * dp)));

    let mut b = DMatrix::zeros(n, 2);
    b.view_mut((0, 0), (np, 1)).copy_from(&(&bp * s));
    b.view_mut((0, 1), (np, 1)).copy_from(&(&bp * (s * dk)));
    b.view_mut((np, 0), (nk, 1)).copy_from(&(&bk * (-s * dp)));
    b.view_mut((np, 1), (nk, 1)).copy_from(&(&bk * s));

    let mut c = RowDVector::zeros(n);
    c.columns_mut(0, np).copy_from(&(cp * s));
    c.columns_mut(np, nk).copy_from(&(ck * (s * dp)));

    let d = RowDVector::from_row_slice(&[s * dp, s * dp * dk]);
    ContinuousStateSpace::new(a, b, c, d)
}

/// Zero-order-hold discretization through one exponential of the augmented
/// matrix `[[A, B], [0, 0]] * Ts`.
pub fn c2d_zoh(sys: &ContinuousStateSpace, ts: f64) -> Result<DiscreteStateSpace> {
    if !(ts > 0.0 && ts.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "sample time must be positive, got {ts}"
        )));
    }
    let n = sys.order();
    let m = sys.inputs();
    let mut aug = DMatrix::zeros(n + m, n + m);
    aug.view_mut((0, 0), (n, n)).copy_from(&(sys.a() * ts));
    aug.view_mut((0, n), (n, m)).copy_from(&(sys.b() * ts));
    let e = aug.exp();
    let ad = e.view((0, 0), (n, n)).into_owned();
    let bd = e.view((0, n), (n, m)).into_owned();
    DiscreteStateSpace::new(
        ad,
        bd,
        sys.c().clone(),
        sys.d().clone(),
        SampleTime::Seconds(ts),
    )
}

/// Simulates a multi-input system over `inputs.nrows()` steps and returns
/// `y(1), ..., y(N)`, i.e. the output read after each state update.
///
/// Row `k` of `inputs` holds every channel at time `k`.
pub fn simulate_inputs(
    sys: &DiscreteStateSpace,
    x0: &DVector<f64>,
    inputs: &DMatrix<f64>,
) -> Result<Vec<f64>> {
    if x0.len() != sys.order() {
        return Err(dim_err(format!(
            "x0 has length {}, expected {}",
            x0.len(),
            sys.order()
        )));
    }
    if inputs.ncols() != sys.inputs() {
        return Err(dim_err(format!(
            "input matrix has {} channels, system has {}",
            inputs.ncols(),
            sys.inputs()
        )));
    }
    if let Some(&d) = sys.d().iter().find(|&&d| d != 0.0) {
        return Err(Error::Feedthrough(d));
    }
    let mut x = x0.clone();
    let mut y = Vec::with_capacity(inputs.nrows());
    let mut next = DVector::zeros(x.len());
    for k in 0..inputs.nrows() {
        next.gemv(1.0, sys.a(), &x, 0.0);
        for ch in 0..inputs.ncols() {
            next.axpy(inputs[(k, ch)], &sys.b().column(ch), 1.0);
        }
        std::mem::swap(&mut x, &mut next);
        y.push(sys.c().dot(&x.transpose()));
    }
    Ok(y)
}

/// SISO simulation; with a disturbance the measured `y + d` is returned.
pub fn simulate(
    sys: &DiscreteStateSpace,
    x0: &DVector<f64>,
    u: &[f64],
    d: Option<&[f64]>,
) -> Result<Vec<f64>> {
    if sys.inputs() != 1 {
        return Err(dim_err(
            "simulate expects a single-input system; use simulate_inputs",
        ));
    }
    if let Some(d) = d {
        if d.len() != u.len() {
            return Err(dim_err(format!(
                "disturbance length {} != input length {}",
                d.len(),
                u.len()
            )));
        }
    }
    let inputs = DMatrix::from_column_slice(u.len(), 1, u);
    let mut y = simulate_inputs(sys, x0, &inputs)?;
    if let Some(d) = d {
        y.iter_mut().zip(d).for_each(|(yk, dk)| *yk += dk);
    }
    Ok(y)
}
