//! Experiment orchestration.
//!
//! Every random quantity is drawn from a substream addressed by what it is for
//! (instance, challenge set, trial, bit), so reports depend only on the
//! configuration and seed, never on the number of workers.

use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind};
use super::report::{Distribution, Report, Table};
use crate::device::Environment;
use crate::error::{Error, Result};
use crate::metrics::{self, BitVector, ResponseRecord, SacMap};
use crate::power;
use crate::puf::{Architecture, Challenge, PufInstance};
use crate::rng::Substreams;
use crate::stats::{self, Summary};

const HISTOGRAM_BINS: usize = 20;

/// Runs `config` on a pool of `workers` threads (all available cores when
/// `None`).
pub fn run(config: &ExperimentConfig, workers: Option<usize>) -> Result<Report> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(Error::invalid("workers must be >= 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match config.kind {
        ExperimentKind::Metrics => run_metrics_suite(config),
        ExperimentKind::Reliability => run_reliability_sweep(config),
        ExperimentKind::Sac => run_sac_experiment(config),
        ExperimentKind::Snr => run_snr_sweep(config),
    })
}

/// Seed of instance `i` under `master_seed`.
pub fn instance_seed(master_seed: u64, i: usize) -> u64 {
    Substreams::new(master_seed).named("instance").child(i as u64).key()
}

pub fn build_instances(config: &ExperimentConfig) -> Result<Vec<PufInstance>> {
    (0..config.counts.instances)
        .into_par_iter()
        .map(|i| PufInstance::build(&config.puf, instance_seed(config.master_seed, i)))
        .collect()
}

/// Challenge sets shared by all instances: `sets[ch][j]`.
pub fn challenge_sets(master_seed: u64, sets: usize, bits: usize) -> Vec<Vec<Challenge>> {
    let s = Substreams::new(master_seed).named("challenge");
    (0..sets as u64)
        .map(|ch| (0..bits as u64).map(|j| Challenge(s.path(&[ch, j]).key())).collect())
        .collect()
}

/// Evaluates every (instance, set, trial, bit). The rng of each evaluation is
/// `streams.path([i, ch, t, j])`, so reusing `streams` across parameter
/// sweeps gives common random numbers.
pub fn collect_responses(
    instances: &[PufInstance],
    sets: &[Vec<Challenge>],
    trials: usize,
    env: &Environment,
    arch: Architecture,
    streams: &Substreams,
) -> Result<ResponseRecord> {
    let n = sets.first().map_or(0, Vec::len);
    let per_instance: Vec<Vec<BitVector>> = instances
        .par_iter()
        .enumerate()
        .map(|(i, puf)| {
            let mut out = Vec::with_capacity(sets.len() * trials);
            for (ch, set) in sets.iter().enumerate() {
                for t in 0..trials {
                    let mut bits = BitVector::zeros(n);
                    for (j, &c) in set.iter().enumerate() {
                        let mut rng = streams.path(&[i as u64, ch as u64, t as u64, j as u64]).rng();
                        bits.set(j, puf.evaluate(c, env, 0, arch, &mut rng)?.bit);
                    }
                    out.push(bits);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut rec = ResponseRecord::new(instances.len(), sets.len(), trials, n)?;
    for (i, responses) in per_instance.iter().enumerate() {
        for (k, bits) in responses.iter().enumerate() {
            rec.set_response(i, k / trials, k % trials, bits)?;
        }
    }
    Ok(rec)
}

/// Uniformity of clustered challenge sets, one value per (instance, set).
/// Set `s` is the same for every instance and both architectures.
pub fn worst_case_uniformity(
    instances: &[PufInstance],
    config: &ExperimentConfig,
    arch: Architecture,
) -> Result<Vec<f64>> {
    let streams = Substreams::new(config.master_seed);
    let n = config.counts.response_bits;
    let sets: Vec<Vec<Challenge>> = (0..config.sac.worst_case_sets as u64)
        .map(|s| {
            let mut rng = streams.named("worst_case_set").child(s).rng();
            metrics::clustered_challenges(n, config.sac.worst_case_max_hd, &mut rng)
        })
        .collect::<Result<_>>()?;
    let eval = streams.named("worst_case_eval");
    let values: Vec<Vec<f64>> = instances
        .par_iter()
        .enumerate()
        .map(|(i, puf)| {
            sets.iter()
                .enumerate()
                .map(|(s, set)| {
                    let mut bits = BitVector::zeros(n);
                    for (j, &c) in set.iter().enumerate() {
                        let mut rng = eval.path(&[i as u64, s as u64, j as u64]).rng();
                        bits.set(j, puf.evaluate(c, &config.environment, 0, arch, &mut rng)?.bit);
                    }
                    metrics::uniformity(&bits)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(values.concat())
}

fn mean_abs_deviation_from_half(xs: &[f64]) -> f64 {
    stats::mean(&xs.iter().map(|x| (x - 50.0).abs()).collect::<Vec<_>>())
}

fn put_distribution(report: &mut Report, name: &str, xs: &[f64]) {
    let d = Distribution::of_percentages(xs, HISTOGRAM_BINS);
    report.scalars.insert(format!("{name}_mean"), d.summary.mean);
    report.scalars.insert(format!("{name}_std"), d.summary.std_dev);
    report.distributions.insert(name.to_owned(), d);
}

fn put_worst_case(report: &mut Report, instances: &[PufInstance], config: &ExperimentConfig) -> Result<()> {
    if config.sac.worst_case_sets == 0 {
        return Ok(());
    }
    for (arch, label) in [(Architecture::Dual, "dual"), (Architecture::Single, "single")] {
        let uf = worst_case_uniformity(instances, config, arch)?;
        let name = format!("uniformity_worst_{label}");
        report
            .scalars
            .insert(format!("{name}_mean_abs_dev"), mean_abs_deviation_from_half(&uf));
        put_distribution(report, &name, &uf);
    }
    Ok(())
}

pub fn run_metrics_suite(config: &ExperimentConfig) -> Result<Report> {
    let c = &config.counts;
    let instances = build_instances(config)?;
    let sets = challenge_sets(config.master_seed, c.challenges, c.response_bits);
    let eval = Substreams::new(config.master_seed).named("eval");
    let rec = collect_responses(&instances, &sets, c.trials, &config.environment, Architecture::Dual, &eval)?;

    let mut report = Report::new(config);
    put_distribution(&mut report, "uniformity", &metrics::uniformity_values(&rec, 0));
    if c.instances >= 2 {
        put_distribution(&mut report, "bit_aliasing", &metrics::bit_aliasing_values(&rec, 0)?);
        put_distribution(&mut report, "uniqueness", &metrics::uniqueness_values(&rec, 0)?);
    }
    if c.challenges >= 2 {
        put_distribution(&mut report, "diffuseness", &metrics::diffuseness_values(&rec)?);
    }
    if c.trials >= 2 {
        put_distribution(&mut report, "bit_error_rate", &metrics::bit_error_rate_values(&rec)?);
    }
    put_worst_case(&mut report, &instances, config)?;
    Ok(report)
}

pub fn run_reliability_sweep(config: &ExperimentConfig) -> Result<Report> {
    let c = &config.counts;
    let instances = build_instances(config)?;
    let sets = challenge_sets(config.master_seed, c.challenges, c.response_bits);
    let eval = Substreams::new(config.master_seed).named("eval");

    let mut table = Table::new(&["cs", "sense_margin", "ber_mean", "ber_std", "reliability_mean"]);
    let mut report = Report::new(config);
    for &margin in &config.sweep.sense_margins {
        for &cs in &config.sweep.cs_values {
            let variant: Vec<PufInstance> = instances
                .iter()
                .map(|p| p.with_cs(cs)?.with_sense_margin(margin))
                .collect::<Result<_>>()?;
            let rec = collect_responses(&variant, &sets, c.trials, &config.environment, Architecture::Dual, &eval)?;
            let ber = Summary::of(&metrics::bit_error_rate_values(&rec)?);
            table.push(vec![cs as f64, margin, ber.mean, ber.std_dev, 100.0 - ber.mean]);
        }
    }
    report.tables.insert("ber_grid".into(), table);
    Ok(report)
}

fn map_table(map: &SacMap) -> Table {
    let mut t = Table::new(&["j", "k", "rate"]);
    for (j, row) in map.rates.iter().enumerate() {
        for (k, &rate) in row.iter().enumerate() {
            t.push(vec![j as f64, k as f64, rate]);
        }
    }
    t
}

pub fn run_sac_experiment(config: &ExperimentConfig) -> Result<Report> {
    let s = &config.sac;
    let instances = build_instances(config)?;
    let env = &config.environment;
    let streams = Substreams::new(config.master_seed);
    let dims = (config.puf.rows, config.puf.cols);

    // Per instance: (dual map, single map), each averaged over references.
    let maps: Vec<(SacMap, SacMap)> = instances
        .par_iter()
        .enumerate()
        .map(|(i, puf)| {
            let mut rng = streams.named("sac_map").child(i as u64).rng();
            let (mut dual, mut single) = (Vec::new(), Vec::new());
            for _ in 0..s.references {
                let reference = metrics::random_selection(puf.cs(), dims, &mut rng);
                dual.push(metrics::sac_map(puf, env, &reference, s.max_j, s.max_k, s.samples, Architecture::Dual, &mut rng)?);
                single.push(metrics::sac_map(puf, env, &reference, s.max_j, s.max_k, s.samples, Architecture::Single, &mut rng)?);
            }
            Ok((SacMap::average(&dual)?, SacMap::average(&single)?))
        })
        .collect::<Result<_>>()?;

    let mut report = Report::new(config);
    for (label, pick) in [("dual", 0usize), ("single", 1)] {
        let per_instance: Vec<SacMap> = maps.iter().map(|m| if pick == 0 { m.0.clone() } else { m.1.clone() }).collect();
        let devs: Vec<f64> = per_instance.iter().map(SacMap::max_deviation).collect();
        let overall = SacMap::average(&per_instance)?;
        report.scalars.insert(format!("sac_max_dev_{label}"), overall.max_deviation());
        report.scalars.insert(format!("sac_max_dev_{label}_instance_mean"), stats::mean(&devs));
        report.tables.insert(format!("sac_map_{label}"), map_table(&overall));
    }
    let wins = maps.iter().filter(|(d, s)| d.max_deviation() < s.max_deviation()).count();
    report.scalars.insert("sac_dual_closer_fraction".into(), wins as f64 / maps.len() as f64);

    let mut table = Table::new(&["hd", "dual_rate", "single_rate"]);
    for &hd in &s.hd_values {
        let mut row = vec![hd as f64];
        for arch in [Architecture::Dual, Architecture::Single] {
            let rates: Vec<f64> = instances
                .par_iter()
                .enumerate()
                .map(|(i, puf)| {
                    let mut rng = streams.named("sac_challenge").path(&[i as u64, hd as u64]).rng();
                    let base: Vec<Challenge> = (0..s.base_challenges).map(|_| Challenge::random(&mut rng)).collect();
                    metrics::sac_challenge_test(puf, env, &base, hd, arch, &mut rng)
                })
                .collect::<Result<_>>()?;
            row.push(stats::mean(&rates));
        }
        table.push(row);
    }
    report.tables.insert("sac_challenge".into(), table);
    put_worst_case(&mut report, &instances, config)?;
    Ok(report)
}

pub fn run_snr_sweep(config: &ExperimentConfig) -> Result<Report> {
    let instances = build_instances(config)?;
    let streams = Substreams::new(config.master_seed);
    let mut dummy_counts = config.sweep.dummy_counts.clone();
    dummy_counts.sort_unstable();
    dummy_counts.dedup();

    // snr[d][i] and mean power[d][i]
    let mut snr = vec![Vec::with_capacity(instances.len()); dummy_counts.len()];
    let mut mean_power = vec![Vec::with_capacity(instances.len()); dummy_counts.len()];
    for (i, puf) in instances.iter().enumerate() {
        let mut rng = streams.named("snr_challenges").child(i as u64).rng();
        let challenges: Vec<Challenge> = (0..config.sweep.trace_length).map(|_| Challenge::random(&mut rng)).collect();
        let eval = streams.named("snr_eval").child(i as u64);
        for (k, &d) in dummy_counts.iter().enumerate() {
            let trace = power::collect_traces(puf, &challenges, &config.environment, d, &eval)?;
            snr[k].push(power::snr(&trace)?);
            mean_power[k].push(stats::mean(&trace.samples.iter().map(|s| s.power_w).collect::<Vec<_>>()));
        }
    }

    let mut report = Report::new(config);
    let mut table = Table::new(&["dummy_count", "snr_mean", "snr_std", "power_mean_w"]);
    let mut means = Vec::with_capacity(dummy_counts.len());
    for (k, &d) in dummy_counts.iter().enumerate() {
        let s = Summary::of(&snr[k]);
        means.push(s.mean);
        table.push(vec![d as f64, s.mean, s.std_dev, stats::mean(&mean_power[k])]);
    }
    if dummy_counts.len() >= 2 {
        let x: Vec<f64> = dummy_counts.iter().map(|&d| d as f64).collect();
        report.scalars.insert("snr_spearman".into(), stats::spearman(&x, &means));
    }
    report.tables.insert("snr".into(), table);
    Ok(report)
}
