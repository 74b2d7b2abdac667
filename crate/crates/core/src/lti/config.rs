//! JSON system definitions: `{"tf": {...}}` or `{"ss": {...}}`.

use nalgebra::{DMatrix, DVector, RowDVector};
use serde::{Deserialize, Serialize};

use super::state_space::{ContinuousStateSpace, DiscreteStateSpace, SampleTime};
use super::transfer::{Domain, Realization, TransferFunction};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemDefinition {
    Tf(TfDefinition),
    Ss(SsDefinition),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainTag {
    #[serde(rename = "s")]
    S,
    #[serde(rename = "z")]
    Z,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TfDefinition {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    pub domain: DomainTag,
    #[serde(rename = "Ts", default, skip_serializing_if = "Option::is_none")]
    pub ts: Option<f64>,
}

/// State-space definition; present `Ts` marks a discrete system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsDefinition {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    #[serde(rename = "D", default)]
    pub d: f64,
    #[serde(rename = "Ts", default, skip_serializing_if = "Option::is_none")]
    pub ts: Option<f64>,
}

impl SystemDefinition {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("system definition: {e}")))
    }

    pub fn build(&self) -> Result<Realization> {
        match self {
            SystemDefinition::Tf(tf) => {
                let domain = match (tf.domain, tf.ts) {
                    (DomainTag::S, _) => Domain::Continuous,
                    (DomainTag::Z, Some(ts)) => Domain::Discrete(SampleTime::Seconds(ts)),
                    (DomainTag::Z, None) => Domain::Discrete(SampleTime::Abstract),
                };
                TransferFunction::new(tf.num.clone(), tf.den.clone(), domain)?.realize()
            }
            SystemDefinition::Ss(ss) => {
                let n = ss.a.len();
                if ss.a.iter().any(|row| row.len() != n) {
                    return Err(Error::Config("ss.A must be square".into()));
                }
                let a = DMatrix::from_fn(n, n, |i, j| ss.a[i][j]);
                let b = DVector::from_column_slice(&ss.b);
                let c = RowDVector::from_row_slice(&ss.c);
                match ss.ts {
                    Some(ts) => Ok(Realization::Discrete(DiscreteStateSpace::siso(
                        a,
                        b,
                        c,
                        ss.d,
                        SampleTime::Seconds(ts),
                    )?)),
                    None => Ok(Realization::Continuous(ContinuousStateSpace::siso(
                        a, b, c, ss.d,
                    )?)),
                }
            }
        }
    }

    /// Builds and requires a discrete realization.
    pub fn build_discrete(&self) -> Result<DiscreteStateSpace> {
        match self.build()? {
            Realization::Discrete(sys) => Ok(sys),
            Realization::Continuous(_) => Err(Error::Config(
                "a discrete system is required (use domain \"z\" or give Ts)".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_forms() {
        let tf =
            SystemDefinition::from_json(r#"{"tf": {"num": [1], "den": [1, -0.5], "domain": "z"}}"#)
                .unwrap();
        let sys = tf.build_discrete().unwrap();
        assert_eq!(sys.a()[(0, 0)], 0.5);

        let ss = SystemDefinition::from_json(
            r#"{"ss": {"A": [[0.5]], "B": [1], "C": [1], "D": 0, "Ts": 0.01}}"#,
        )
        .unwrap();
        let sys = ss.build_discrete().unwrap();
        assert_eq!(sys.sample_time(), SampleTime::Seconds(0.01));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = SystemDefinition::from_json(
            r#"{"tf": {"num": [1], "den": [1, 1], "domain": "s", "gain": 2}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("gain"), "{err}");
    }
}
