use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::run::IlcRun;
use super::step::Variant;
use crate::error::{Error, Result};
use crate::linalg::spectral_norm;
use crate::lti::{BoxConstraint, LiftedSystem};

/// Largest horizon for which `jbar` enumerates all box vertices.
pub const JBAR_EXACT_MAX_N: usize = 16;
/// Slack on envelope checks, relative to `1 + envelope`.
pub const ENVELOPE_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JBarKind {
    Exact,
    UpperBound,
}

/// `max_{u in box} 1/2 ||r - G u - c||^2` or an upper bound on it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JBar {
    pub value: f64,
    pub kind: JBarKind,
}

pub fn jbar(g: &DMatrix<f64>, c: &DVector<f64>, r: &DVector<f64>, bounds: &BoxConstraint) -> JBar {
    let n = g.ncols();
    let target = r - c;
    if n <= JBAR_EXACT_MAX_N {
        // a convex function peaks at a vertex
        let mut best = f64::NEG_INFINITY;
        let mut v = DVector::zeros(n);
        for mask in 0u32..(1u32 << n) {
            for i in 0..n {
                v[i] = if mask >> i & 1 == 1 {
                    bounds.upper()
                } else {
                    bounds.lower()
                };
            }
            best = best.max(0.5 * (&target - g * &v).norm_squared());
        }
        JBar {
            value: best,
            kind: JBarKind::Exact,
        }
    } else {
        let umax = bounds.lower().abs().max(bounds.upper().abs());
        let b = target.norm() + spectral_norm(g) * (n as f64).sqrt() * umax;
        JBar {
            value: 0.5 * b * b,
            kind: JBarKind::UpperBound,
        }
    }
}

/// Function and gradient error bounds of the inexact oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleBounds {
    pub delta1: f64,
    pub delta2: f64,
    pub delta: f64,
    /// `sup ||a - b||` over the box.
    pub diameter: f64,
    pub jbar: JBar,
}

/// `delta1 = sqrt(2 J N) d + N d^2 / 2`,
/// `delta2 = ||G~ - G|| sqrt(2 J) + ||G~|| sqrt(N) d`,
/// `delta = 2 delta1 + 2 delta2 D`.
pub fn oracle_bounds(
    g: &DMatrix<f64>,
    g_tilde: &DMatrix<f64>,
    dbar: f64,
    bounds: &BoxConstraint,
    jbar: JBar,
) -> Result<OracleBounds> {
    if g.shape() != g_tilde.shape() || !g.is_square() {
        return Err(Error::Dimension(
            "G and G~ must be square and of equal size".into(),
        ));
    }
    if !(dbar >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "disturbance bound must be nonnegative, got {dbar}"
        )));
    }
    let n = g.nrows() as f64;
    let j = jbar.value.max(0.0);
    let delta1 = (2.0 * j * n).sqrt() * dbar + 0.5 * n * dbar * dbar;
    let delta2 =
        spectral_norm(&(g_tilde - g)) * (2.0 * j).sqrt() + spectral_norm(g_tilde) * n.sqrt() * dbar;
    let diameter = bounds.diameter();
    Ok(OracleBounds {
        delta1,
        delta2,
        delta: 2.0 * delta1 + 2.0 * delta2 * diameter,
        diameter,
        jbar,
    })
}

/// `L ||u* - u0||^2 / (4 j) + delta`, for `j >= 1`.
pub fn classical_envelope(l: f64, dist_sq: f64, delta: f64, j: usize) -> f64 {
    l * dist_sq / (4.0 * j as f64) + delta
}

/// `2 L ||u* - u0||^2 / ((j + 1)(j + 2)) + (j + 3) delta / 3`.
pub fn fast_envelope(l: f64, dist_sq: f64, delta: f64, j: usize) -> f64 {
    let jf = j as f64;
    2.0 * l * dist_sq / ((jf + 1.0) * (jf + 2.0)) + (jf + 3.0) * delta / 3.0
}

/// Trial count after which a hybrid run switched at `s` is within `tau` of
/// the optimum; `None` when `tau <= delta` or `xi <= 0`.
pub fn j_star(l: f64, xi: f64, dist_sq: f64, delta: f64, s: usize, tau: f64) -> Option<f64> {
    if tau <= delta || xi <= 0.0 {
        return None;
    }
    let s1 = s as f64 + 1.0;
    let num = 6.0 * l * l * dist_sq + delta * l * s1 * (s1 + 1.0) * (s1 + 2.0);
    let den = 6.0 * xi * s1 * (s1 + 1.0) * (tau - delta);
    Some(num / den + s as f64)
}

/// Minimiser of the exact cost over the box. Uses `G^{-1}(r - c)` when it is
/// feasible, otherwise accelerated projected gradient with restarts.
pub fn optimal_input(
    lifted: &LiftedSystem,
    r: &DVector<f64>,
    bounds: &BoxConstraint,
) -> Result<DVector<f64>> {
    if let Ok(u) = lifted.unconstrained_optimum(r) {
        if bounds.contains(&u) {
            return Ok(u);
        }
    }
    let l = lifted.lipschitz();
    let mut x = bounds.project(&DVector::from_element(r.len(), bounds.center()));
    let mut y = x.clone();
    let mut t = 1.0f64;
    for _ in 0..1_000_000 {
        let next = bounds.project(&(&y - lifted.gradient(&y, r) / l));
        let step = (&next - &x).norm();
        // gradient-based restart
        let restart = (&y - &next).dot(&(&next - &x)) > 0.0;
        let t_next = if restart {
            1.0
        } else {
            0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt())
        };
        y = if restart {
            next.clone()
        } else {
            &next + (&next - &x) * ((t - 1.0) / t_next)
        };
        x = next;
        t = t_next;
        if step <= 1e-14 * (1.0 + x.norm()) {
            let mapped = bounds.project(&(&x - lifted.gradient(&x, r) / l));
            if (&mapped - &x).norm() <= 1e-12 * (1.0 + x.norm()) {
                return Ok(x);
            }
        }
    }
    Ok(x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub j: usize,
    pub gap: f64,
    pub envelope: Option<f64>,
    pub violated: bool,
}

/// Per-trial optimality gaps against the matching envelope.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub variant: Variant,
    pub bounds: OracleBounds,
    pub lipschitz: f64,
    pub strong_convexity: f64,
    pub switch_index: Option<usize>,
    /// Oracle diagnostic: needs the true map.
    pub j_star: Option<f64>,
    pub rows: Vec<EnvelopeRow>,
}

impl BoundReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violated).count()
    }

    /// CSV `j,gap,envelope,violated`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["j", "gap", "envelope", "violated"])?;
        for r in &self.rows {
            writer.write_record([
                r.j.to_string(),
                format!("{:e}", r.gap),
                r.envelope.map(|e| format!("{e:e}")).unwrap_or_default(),
                u8::from(r.violated).to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Classical runs use the `1/(4j)` envelope from `j = 1`, fast runs the
/// accelerated one from `j = 0`; a hybrid run follows the fast envelope up to
/// its switch `s` and a classical envelope restarted at `u_s` after it.
/// `tau` sets the accuracy for `j_star`.
pub fn envelopes(
    run: &IlcRun,
    lifted: &LiftedSystem,
    r: &DVector<f64>,
    u_star: &DVector<f64>,
    bounds: &OracleBounds,
    tau: f64,
) -> BoundReport {
    let l = lifted.lipschitz();
    let delta = bounds.delta;
    let u0 = &run.records[0].u;
    let j_opt = lifted.cost(u_star, r);
    let dist0 = (u_star - u0).norm_squared();
    let s = run.switch_index;
    let rows = run
        .records
        .iter()
        .map(|rec| {
            let gap = lifted.cost(&rec.u, r) - j_opt;
            let envelope = match (run.variant, s) {
                (Variant::Classical, _) => {
                    (rec.j >= 1).then(|| classical_envelope(l, dist0, delta, rec.j))
                }
                (Variant::Fast, _) | (Variant::Hybrid, None) => {
                    Some(fast_envelope(l, dist0, delta, rec.j))
                }
                (Variant::Hybrid, Some(s)) if rec.j <= s => {
                    Some(fast_envelope(l, dist0, delta, rec.j))
                }
                (Variant::Hybrid, Some(s)) => {
                    let dist_s = (u_star - &run.records[s].u).norm_squared();
                    Some(classical_envelope(l, dist_s, delta, rec.j - s))
                }
            };
            let violated = envelope.is_some_and(|e| gap > e + ENVELOPE_SLACK * (1.0 + e.abs()));
            EnvelopeRow {
                j: rec.j,
                gap,
                envelope,
                violated,
            }
        })
        .collect();
    BoundReport {
        variant: run.variant,
        bounds: *bounds,
        lipschitz: l,
        strong_convexity: lifted.strong_convexity(),
        switch_index: s,
        j_star: j_star(
            l,
            lifted.strong_convexity(),
            dist0,
            delta,
            s.unwrap_or(0),
            tau,
        ),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_jbar() {
        let b = BoxConstraint::new(-1.0, 1.0, 1).unwrap();
        let j = jbar(
            &DMatrix::identity(1, 1),
            &DVector::zeros(1),
            &DVector::zeros(1),
            &b,
        );
        assert_eq!(
            j,
            JBar {
                value: 0.5,
                kind: JBarKind::Exact
            }
        );
    }

    #[test]
    fn exact_information_has_zero_bounds() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.3, 1.0]);
        let b = BoxConstraint::new(-1.0, 1.0, 2).unwrap();
        let jb = jbar(&g, &DVector::zeros(2), &DVector::from_element(2, 0.5), &b);
        let l = oracle_bounds(&g, &g, 0.0, &b, jb).unwrap();
        assert_eq!((l.delta1, l.delta2, l.delta), (0.0, 0.0, 0.0));
        let l = oracle_bounds(&g, &g, 0.1, &b, jb).unwrap();
        assert!((l.delta2 - spectral_norm(&g) * 2f64.sqrt() * 0.1).abs() < 1e-15);
    }

    #[test]
    fn j_star_specialisation() {
        let (l, xi, d2, tau) = (3.0, 0.5, 2.0, 0.1);
        let v = j_star(l, xi, d2, 0.0, 0, tau).unwrap();
        assert!((v - l * l * d2 / (2.0 * xi * tau)).abs() < 1e-12);
        assert!(j_star(l, xi, d2, 0.2, 0, tau).is_none());
    }
}
