use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::batch::BatchReport;
use super::case_study::CaseStudyReport;
use super::common::{stream, SEED_STREAMS};
use super::config::ExperimentConfig;
use super::toy::{Curve, RelErrRow, ToyReport};
use crate::error::Result;

#[allow(clippy::large_enum_variant)]
pub enum Report {
    Toy(ToyReport),
    Batch(BatchReport),
    CaseStudy(CaseStudyReport),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub scenario: String,
    pub seed: u64,
    pub derived_seeds: BTreeMap<String, u64>,
    pub config_sha256: String,
    pub config: ExperimentConfig,
    pub files: Vec<String>,
    /// What each file holds.
    pub artifacts: BTreeMap<String, String>,
    pub excluded_systems: usize,
}

struct Writer {
    dir: PathBuf,
    prefix: String,
    disturbance: String,
    files: Vec<String>,
    artifacts: BTreeMap<String, String>,
}

impl Writer {
    fn name(&self, method: &str, repr: &str) -> String {
        format!(
            "{}_{}_{}_{}.csv",
            self.prefix, method, repr, self.disturbance
        )
    }

    fn table(
        &mut self,
        method: &str,
        repr: &str,
        what: &str,
        header: &[&str],
        rows: Vec<Vec<String>>,
    ) -> Result<()> {
        let name = self.name(method, repr);
        let mut w = csv::Writer::from_path(self.dir.join(&name))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        self.register(name, what);
        Ok(())
    }

    fn register(&mut self, name: String, what: &str) {
        self.artifacts.insert(name.clone(), what.to_string());
        self.files.push(name);
    }

    fn curve(&mut self, c: &Curve, u_star: &nalgebra::DVector<f64>, what: &str) -> Result<()> {
        let name = self.name(c.run.variant.name(), c.repr.name());
        c.run.save_csv(self.dir.join(&name), Some(u_star))?;
        self.register(name, what);
        Ok(())
    }
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn relerr_rows(table: &[RelErrRow]) -> Vec<Vec<String>> {
    table
        .iter()
        .map(|r| vec![r.disturbance.name().to_string(), num(r.dd), num(r.si)])
        .collect()
}

/// Writes one CSV per table and curve plus `manifest.json` into `dir`,
/// creating it if needed. File names are `<scenario>_<method>_<repr>_<disturbance>.csv`.
pub fn emit_csv(
    report: &Report,
    cfg: &ExperimentConfig,
    dir: impl AsRef<Path>,
) -> Result<Manifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut w = Writer {
        dir: dir.to_path_buf(),
        prefix: cfg.scenario.name().to_string(),
        disturbance: cfg.disturbance.name().to_string(),
        files: Vec::new(),
        artifacts: BTreeMap::new(),
    };
    let relerr_header = ["disturbance", "dd", "si"];
    let mut excluded = 0;
    match report {
        Report::Toy(r) => {
            w.table(
                "relerr",
                "both",
                "relative error of both estimates per disturbance class",
                &relerr_header,
                relerr_rows(&r.table),
            )?;
            for c in &r.curves {
                w.curve(c, &r.u_star, "per-trial tracking and input errors")?;
            }
        }
        Report::CaseStudy(r) => {
            w.table(
                "relerr",
                "both",
                "relative error of both estimates",
                &relerr_header,
                relerr_rows(&r.table),
            )?;
            for c in &r.curves {
                w.curve(c, &r.u_star, "per-trial tracking and input errors")?;
            }
            let rows = r
                .feedback
                .eps_norms
                .iter()
                .zip(&r.feedback.e_norms)
                .enumerate()
                .map(|(j, (eps, e))| vec![j.to_string(), num(*e), num(*eps)])
                .collect();
            w.table(
                "feedback",
                "none",
                "tracking error under feedback alone",
                &["j", "e_norm", "eps_norm"],
                rows,
            )?;
            let rows = r
                .u_star
                .iter()
                .zip(&r.reference)
                .enumerate()
                .map(|(k, (u, y))| vec![k.to_string(), num(*u), num(*y)])
                .collect();
            w.table(
                "optimum",
                "true",
                "optimal feedforward input and reference",
                &["k", "u_star", "r"],
                rows,
            )?;
        }
        Report::Batch(r) => {
            excluded = r.failures.len();
            let rows = r
                .records
                .iter()
                .map(|s| vec![s.index.to_string(), num(s.dd_error), num(s.si_error)])
                .collect();
            w.table(
                "relerr",
                "both",
                "relative error of both estimates per system",
                &["system", "dd", "si"],
                rows,
            )?;
            for s in &r.summary {
                let rows = r
                    .records
                    .iter()
                    .filter_map(|rec| {
                        rec.methods
                            .iter()
                            .find(|m| m.variant == s.variant && m.repr == s.repr)
                            .map(|m| {
                                vec![
                                    rec.index.to_string(),
                                    num(m.stats.early),
                                    num(m.stats.final_stage),
                                ]
                            })
                    })
                    .collect();
                w.table(
                    s.variant.name(),
                    s.repr.name(),
                    "early and final stage mean tracking error per system",
                    &["system", "early", "final"],
                    rows,
                )?;
            }
            let mut rows = Vec::new();
            for s in &r.summary {
                for (stage, p) in [("early", s.early), ("final", s.final_stage)] {
                    rows.push(vec![
                        s.variant.name().to_string(),
                        s.repr.name().to_string(),
                        stage.to_string(),
                        num(p.p0),
                        num(p.p25),
                        num(p.p50),
                        num(p.p75),
                        num(p.p100),
                    ]);
                }
            }
            w.table(
                "percentiles",
                "both",
                "stage indicator percentiles across the batch",
                &[
                    "variant", "repr", "stage", "p0", "p25", "p50", "p75", "p100",
                ],
                rows,
            )?;
        }
    }
    let canonical = cfg.canonical_json();
    let manifest = Manifest {
        scenario: cfg.scenario.name().to_string(),
        seed: cfg.seed,
        derived_seeds: SEED_STREAMS
            .iter()
            .map(|(n, i)| (n.to_string(), stream(cfg.seed, *i)))
            .collect(),
        config_sha256: hex::encode(Sha256::digest(canonical.as_bytes())),
        config: cfg.clone(),
        files: w.files,
        artifacts: w.artifacts,
        excluded_systems: excluded,
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(manifest)
}
