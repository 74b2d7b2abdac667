//! A reduced random-system batch: early and final stage statistics for every
//! update law and map.

use ilc_forge::bench::{batch_experiment, ExperimentConfig, Repr, Scenario};
use ilc_forge::ilc::Variant;

fn main() -> ilc_forge::Result<()> {
    let mut cfg = ExperimentConfig::defaults(Scenario::Batch);
    cfg.systems = 12;
    cfg.trials = 200;
    cfg.seed = 5;
    let report = batch_experiment(&cfg)?;

    println!(
        "systems {}  excluded {}",
        report.records.len(),
        report.failures.len()
    );
    println!(
        "mean relative error  dd {:.4}  si {:.4}",
        report.mean_dd_error, report.mean_si_error
    );
    for variant in Variant::ALL {
        for repr in [Repr::Dd, Repr::Si] {
            if let Some(s) = report.stage(variant, repr) {
                println!(
                    "{:>9}/{}: early median {:8.4}  final p25 {:7.4} p50 {:7.4} p75 {:7.4}",
                    variant.name(),
                    repr.name(),
                    s.early.p50,
                    s.final_stage.p25,
                    s.final_stage.p50,
                    s.final_stage.p75
                );
            }
        }
    }
    Ok(())
}
