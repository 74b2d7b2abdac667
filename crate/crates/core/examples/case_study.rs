//! Feedforward learning on the sampled motion loop, compared with feedback
//! alone, and the artifact set written to a temporary directory.

use ilc_forge::bench::{case_study, emit_csv, ExperimentConfig, Report, Scenario};

fn main() -> ilc_forge::Result<()> {
    let cfg = ExperimentConfig::defaults(Scenario::CaseStudy);
    let report = case_study(&cfg)?;
    println!(
        "closed-loop order {}, lag {:?}",
        report.system.order(),
        report.lag
    );
    for row in &report.table {
        println!(
            "relative error ({}): dd {:.3e}  si {:.3e}",
            row.disturbance.name(),
            row.dd,
            row.si
        );
    }
    println!(
        "feedback only: final |eps| {:.4}",
        report.feedback.eps_norms.last().unwrap()
    );
    for c in &report.curves {
        let eps = c.run.final_record().eps_norm;
        println!(
            "{:>9}/{}: final |eps| {eps:.4}",
            c.run.variant.name(),
            c.repr.name()
        );
    }

    let dir = std::env::temp_dir().join("ilc_forge_case_study");
    let manifest = emit_csv(&Report::CaseStudy(report), &cfg, &dir)?;
    println!("wrote {} files to {}", manifest.files.len(), dir.display());
    Ok(())
}
