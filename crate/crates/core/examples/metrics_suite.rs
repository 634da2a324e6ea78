//! Uniformity, bit-aliasing, uniqueness, diffuseness and BER of a small population.

use nrpuf::experiment::{self, ExperimentConfig, ExperimentKind};

fn main() -> nrpuf::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Metrics, 2024);
    cfg.counts.instances = 20;
    cfg.counts.challenges = 100;
    cfg.counts.trials = 5;
    let report = experiment::run(&cfg, None)?;
    for (name, d) in &report.distributions {
        println!("{name:<28} mean {:6.2}%  std {:5.2}  (n = {})", d.summary.mean, d.summary.std_dev, d.summary.count);
    }
    Ok(())
}
