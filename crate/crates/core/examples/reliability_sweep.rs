//! Bit error rate over column count and sense margin.

use nrpuf::experiment::{self, ExperimentConfig, ExperimentKind};

fn main() -> nrpuf::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Reliability, 11);
    cfg.counts.instances = 10;
    cfg.counts.challenges = 200;
    cfg.counts.response_bits = 1;
    cfg.counts.trials = 20;
    cfg.sweep.sense_margins = vec![10e-9, 20e-9, 50e-9, 100e-9];
    let report = experiment::run(&cfg, None)?;
    let grid = &report.tables["ber_grid"];
    println!("{}", grid.columns.join("\t"));
    for row in &grid.rows {
        println!("{}\t{:.0e}\t{:.3}\t{:.3}\t{:.3}", row[0], row[1], row[2], row[3], row[4]);
    }
    Ok(())
}
