use nalgebra::{Complex, DMatrix, DVector, RowDVector};
use serde::{Deserialize, Serialize};

use super::state_space::{ContinuousStateSpace, DiscreteStateSpace, SampleTime};
use crate::error::{Error, Result};

/// Time domain of a transfer function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    /// Laplace variable `s`.
    Continuous,
    /// Shift variable `z`.
    Discrete(SampleTime),
}

/// Rational SISO transfer function with coefficients in descending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferFunction {
    num: Vec<f64>,
    den: Vec<f64>,
    domain: Domain,
}

/// Either kind of realization produced by [`TransferFunction::realize`].
#[derive(Clone, Debug, PartialEq)]
pub enum Realization {
    Continuous(ContinuousStateSpace),
    Discrete(DiscreteStateSpace),
}

fn trim_leading_zeros(p: &[f64]) -> Vec<f64> {
    let first = p.iter().position(|&c| c != 0.0).unwrap_or(p.len());
    p[first..].to_vec()
}

/// Product of two polynomials given in descending powers.
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Horner evaluation of a descending-power polynomial at a complex point.
pub fn poly_eval(p: &[f64], x: Complex<f64>) -> Complex<f64> {
    p.iter().fold(Complex::new(0.0, 0.0), |acc, &c| acc * x + c)
}

impl TransferFunction {
    pub fn new(num: Vec<f64>, den: Vec<f64>, domain: Domain) -> Result<Self> {
        let den = trim_leading_zeros(&den);
        if den.is_empty() {
            return Err(Error::InvalidArgument(
                "denominator must have a nonzero leading coefficient".into(),
            ));
        }
        let mut num = trim_leading_zeros(&num);
        if num.is_empty() {
            num.push(0.0);
        }
        if num.len() > den.len() {
            return Err(Error::ImproperTransferFunction {
                num: num.len() - 1,
                den: den.len() - 1,
            });
        }
        if num.iter().chain(den.iter()).any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self { num, den, domain })
    }

    pub fn continuous(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        Self::new(num, den, Domain::Continuous)
    }

    pub fn discrete(num: Vec<f64>, den: Vec<f64>, sample_time: SampleTime) -> Result<Self> {
        Self::new(num, den, Domain::Discrete(sample_time))
    }

    pub fn numerator(&self) -> &[f64] {
        &self.num
    }

    pub fn denominator(&self) -> &[f64] {
        &self.den
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn order(&self) -> usize {
        self.den.len() - 1
    }

    /// Direct evaluation `num(x) / den(x)`.
    pub fn eval(&self, x: Complex<f64>) -> Complex<f64> {
        poly_eval(&self.num, x) / poly_eval(&self.den, x)
    }

    /// Controllable canonical realization `(A, B, C, D)`.
    ///
    /// No pole/zero cancellation is attempted, so the state dimension always
    /// equals the denominator degree (at least one).
    pub fn canonical_matrices(&self) -> (DMatrix<f64>, DVector<f64>, RowDVector<f64>, f64) {
        let lead = self.den[0];
        let n = self.order();
        if n == 0 {
            // static gain: one inert state keeps every realization at order >= 1
            let gain = self.num[0] / lead;
            return (
                DMatrix::zeros(1, 1),
                DVector::zeros(1),
                RowDVector::zeros(1),
                gain,
            );
        }
        let a: Vec<f64> = self.den.iter().map(|c| c / lead).collect();
        let mut b = vec![0.0; n + 1];
        let offset = n + 1 - self.num.len();
        for (i, c) in self.num.iter().enumerate() {
            b[offset + i] = c / lead;
        }
        let d = b[0];
        let mut am = DMatrix::zeros(n, n);
        for j in 0..n {
            am[(0, j)] = -a[j + 1];
        }
        for i in 1..n {
            am[(i, i - 1)] = 1.0;
        }
        let mut bm = DVector::zeros(n);
        bm[0] = 1.0;
        let cm = RowDVector::from_fn(n, |_, j| b[j + 1] - d * a[j + 1]);
        (am, bm, cm, d)
    }

    /// Realization in the domain this transfer function lives in.
    pub fn realize(&self) -> Result<Realization> {
        let (a, b, c, d) = self.canonical_matrices();
        Ok(match self.domain {
            Domain::Continuous => Realization::Continuous(ContinuousStateSpace::siso(a, b, c, d)?),
            Domain::Discrete(ts) => {
                Realization::Discrete(DiscreteStateSpace::siso(a, b, c, d, ts)?)
            }
        })
    }

    pub fn to_continuous(&self) -> Result<ContinuousStateSpace> {
        match self.realize()? {
            Realization::Continuous(sys) => Ok(sys),
            Realization::Discrete(_) => Err(Error::InvalidArgument(
                "expected a continuous-time transfer function".into(),
            )),
        }
    }

    pub fn to_discrete(&self) -> Result<DiscreteStateSpace> {
        match self.realize()? {
            Realization::Discrete(sys) => Ok(sys),
            Realization::Continuous(_) => Err(Error::InvalidArgument(
                "expected a discrete-time transfer function".into(),
            )),
        }
    }
}

/// Controllable canonical realization of `tf`.
pub fn tf_to_ss(tf: &TransferFunction) -> Result<Realization> {
    tf.realize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn first_order_canonical_form() {
        let tf =
            TransferFunction::discrete(vec![1.0], vec![1.0, -0.5], SampleTime::Abstract).unwrap();
        let sys = tf.to_discrete().unwrap();
        assert_eq!(sys.a()[(0, 0)], 0.5);
        assert_eq!(sys.b()[(0, 0)], 1.0);
        assert_eq!(sys.c()[0], 1.0);
        assert_eq!(sys.d()[0], 0.0);
    }

    #[test]
    fn improper_is_rejected() {
        let err = TransferFunction::continuous(vec![1.0, 0.0, 0.0], vec![1.0, 1.0]).unwrap_err();
        assert!(matches!(
            err,
            Error::ImproperTransferFunction { num: 2, den: 1 }
        ));
    }

    #[test]
    fn cancelling_pair_keeps_its_state() {
        let tf = TransferFunction::discrete(vec![1.0, 1.0], vec![1.0, 1.0], SampleTime::Abstract)
            .unwrap();
        let sys = tf.to_discrete().unwrap();
        assert_eq!(sys.order(), 1);
        for k in 0..8 {
            let z = Complex::from_polar(1.0, 0.3 + 0.7 * k as f64);
            let h = sys.freq_response(z, 0).unwrap();
            assert_relative_eq!(h.re, 1.0, epsilon = 1e-14);
            assert_relative_eq!(h.im, 0.0, epsilon = 1e-14);
            let direct = tf.eval(z);
            assert_relative_eq!((h - direct).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn poly_mul_matches_expansion() {
        assert_eq!(
            poly_mul(&[1.0, 1.9], &[1.0, 100.0]),
            vec![1.0, 101.9, 190.0]
        );
    }

    #[test]
    fn static_gain_realization() {
        let tf = TransferFunction::continuous(vec![3.0], vec![2.0]).unwrap();
        let sys = tf.to_continuous().unwrap();
        assert_eq!(sys.order(), 1);
        assert_eq!(sys.d()[0], 1.5);
        let h = sys.freq_response(Complex::new(0.0, 2.0), 0).unwrap();
        assert_relative_eq!(h.re, 1.5);
    }
}
