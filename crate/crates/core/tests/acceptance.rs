//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

use std::process::Command;
use std::time::Instant;

use nrpuf::experiment::{self, runner, ExperimentConfig, ExperimentKind};
use nrpuf::metrics::{self, ResponseRecord};
use nrpuf::puf::{crp_count, Architecture, Challenge, ComparatorParams, CrpFormula, PowerModel, PufConfig, PufInstance};
use nrpuf::{CrossbarArray, DeviceParams, Environment, Substreams};
use num_bigint::BigUint;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn std_dev(xs: &[f64]) -> f64 {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Row-current spread grows as sqrt(CS); with the single-cell spread set to
/// 132 nA, five columns land near 290 nA.
fn row_current_scaling() -> Outcome {
    let env = Environment::quiet();
    let op = env.nominal_point();
    let hrs_only = DeviceParams {
        stuck_on_prob: 0.0,
        ..Default::default()
    };
    let params = hrs_only.with_hrs_current_sigma(132e-9, &op).unwrap();
    let mut rng = Substreams::new(0x5ca1e).rng();
    let (mut one, mut five) = (Vec::new(), Vec::new());
    for _ in 0..10_000 {
        let row = CrossbarArray::build(1, 5, &params, &mut rng).unwrap();
        one.push(row.row_current_at(&params, 0, &[0], &op).unwrap());
        five.push(row.row_current_at(&params, 0, &[0, 1, 2, 3, 4], &op).unwrap());
    }
    let (s1, s5) = (std_dev(&one), std_dev(&five));
    let ratio = s5 / s1;
    let ratio_ok = (ratio / 5f64.sqrt() - 1.0).abs() <= 0.05;
    let cal = params.cell_current_stats(&op).std_dev();
    let s5_cal = cal * ratio;
    let band_ok = (276e-9..=314e-9).contains(&s5_cal);
    outcome(
        ratio_ok && band_ok,
        format!(
            "sigma ratio {ratio:.4} vs sqrt(5) = {:.4} (tol 5%); sigma(CS=1) = {:.1} nA sampled, {:.1} nA calibrated; sigma(CS=5) = {:.1} nA in [276, 314]",
            5f64.sqrt(),
            s1 * 1e9,
            cal * 1e9,
            s5_cal * 1e9
        ),
    )
}

fn crp_space() -> Outcome {
    let eq5 = crp_count(128, 128, 5, 1, CrpFormula::Eq5).unwrap();
    let table1 = crp_count(128, 128, 5, 1, CrpFormula::Table1).unwrap();
    let lib_ok = eq5.exact == Some(BigUint::from(2_150_395_699_200u64)) && (2.7e13..=2.8e13).contains(&table1.approx);

    let cli = |formula: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_nrpuf"))
            .args(["crp-count", "--n", "128", "--m", "128", "--cs", "5", "--formula", formula])
            .output()
            .expect("run nrpuf");
        String::from_utf8(out.stdout).unwrap().trim().to_owned()
    };
    let (cli_eq5, cli_t1) = (cli("eq5"), cli("table1"));
    let cli_t1_val: f64 = cli_t1.parse().unwrap_or(f64::NAN);
    let cli_ok = cli_eq5 == "2150395699200" && (2.7e13..=2.8e13).contains(&cli_t1_val);
    outcome(
        lib_ok && cli_ok,
        format!("eq5 = {cli_eq5}, table1 = {cli_t1} (expected 2150395699200 and 2.7e13..2.8e13)"),
    )
}

fn hd(rec: &ResponseRecord, a: (usize, usize, usize), b: (usize, usize, usize)) -> u64 {
    let n = rec.dims().3;
    (0..n).filter(|&j| rec.get(a.0, a.1, a.2, j) != rec.get(b.0, b.1, b.2, j)).count() as u64
}

/// Compares every metric with a pairwise brute force; returns mismatches.
fn check_record(rec: &ResponseRecord) -> usize {
    let (p, c, tr, n) = rec.dims();
    let mut bad = 0;
    for i in 0..p {
        for ch in 0..c {
            for t in 0..tr {
                let ones = (0..n).filter(|&j| rec.get(i, ch, t, j)).count();
                let want = 100.0 * ones as f64 / n as f64;
                bad += usize::from(metrics::uniformity(&rec.response(i, ch, t)).unwrap() != want);
            }
        }
    }
    if p >= 2 {
        for ch in 0..c {
            for t in 0..tr {
                for j in 0..n {
                    let ones = (0..p).filter(|&i| rec.get(i, ch, t, j)).count();
                    let want = 100.0 * ones as f64 / p as f64;
                    bad += usize::from(metrics::bit_aliasing(rec, ch, t, j).unwrap() != want);
                }
            }
        }
        let (mut sum, mut cnt) = (0u64, 0u64);
        for ch in 0..c {
            for t in 0..tr {
                for a in 0..p {
                    for b in a + 1..p {
                        sum += hd(rec, (a, ch, t), (b, ch, t));
                        cnt += n as u64;
                    }
                }
            }
        }
        bad += usize::from(metrics::uniqueness(rec).unwrap() != 100.0 * sum as f64 / cnt as f64);
    }
    for i in 0..p {
        if c >= 2 {
            let (mut sum, mut cnt) = (0u64, 0u64);
            for t in 0..tr {
                for a in 0..c {
                    for b in a + 1..c {
                        sum += hd(rec, (i, a, t), (i, b, t));
                        cnt += n as u64;
                    }
                }
            }
            bad += usize::from(metrics::diffuseness(rec, i).unwrap() != 100.0 * sum as f64 / cnt as f64);
        }
        if tr >= 2 {
            for ch in 0..c {
                let (mut sum, mut cnt) = (0u64, 0u64);
                for a in 0..tr {
                    for b in a + 1..tr {
                        sum += hd(rec, (i, ch, a), (i, ch, b));
                        cnt += n as u64;
                    }
                }
                bad += usize::from(metrics::bit_error_rate(rec, i, ch).unwrap() != 100.0 * sum as f64 / cnt as f64);
            }
        }
    }
    bad
}

/// Every record is enumerated when it has at most 12 bits; larger shapes are
/// covered by 300 random fills each.
fn metric_oracles() -> Outcome {
    let mut rng = Substreams::new(3).rng();
    let (mut records, mut bad) = (0usize, 0usize);
    for p in 1..=3 {
        for c in 1..=3 {
            for tr in 1..=3 {
                for n in 1..=4 {
                    let bits = p * c * tr * n;
                    if bits <= 12 {
                        for pattern in 0u32..(1 << bits) {
                            let rec = ResponseRecord::from_fn(p, c, tr, n, |i, ch, t, j| {
                                pattern >> (((i * c + ch) * tr + t) * n + j) & 1 == 1
                            })
                            .unwrap();
                            bad += check_record(&rec);
                            records += 1;
                        }
                    } else {
                        for _ in 0..300 {
                            let rec = ResponseRecord::from_fn(p, c, tr, n, |_, _, _, _| rng.random()).unwrap();
                            bad += check_record(&rec);
                            records += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(bad == 0, format!("{records} records over all 108 shapes, {bad} mismatches"))
}

fn reliability_trend() -> Outcome {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Reliability, 0xbe7);
    cfg.counts.instances = 40;
    cfg.counts.challenges = 500;
    cfg.counts.response_bits = 1;
    cfg.counts.trials = 50;
    cfg.sweep.cs_values = vec![1, 2, 3, 4, 5];
    cfg.sweep.sense_margins = vec![20e-9];
    let report = experiment::run(&cfg, None).unwrap();
    let ber = report.tables["ber_grid"].column("ber_mean").unwrap();
    let decreasing = ber.windows(2).all(|w| w[1] < w[0]);
    let cs1 = (2.0..=5.0).contains(&ber[0]);
    let cs5 = (0.8..=2.2).contains(&ber[4]);
    let shown: Vec<String> = ber.iter().map(|b| format!("{b:.2}%")).collect();
    outcome(
        decreasing && cs1 && cs5,
        format!(
            "BER over CS=1..5: [{}] (40 instances x 500 challenges x 50 trials); strictly decreasing: {decreasing}; CS=1 in [2,5]: {cs1}; CS=5 in [0.8,2.2]: {cs5}",
            shown.join(", ")
        ),
    )
}

fn hd_metrics() -> Outcome {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Metrics, 0x4d);
    cfg.counts.instances = 100;
    cfg.counts.challenges = 1000;
    cfg.counts.response_bits = 64;
    cfg.counts.trials = 1;
    cfg.sac.worst_case_sets = 0;
    let r = experiment::run(&cfg, None).unwrap();
    let get = |k: &str| r.scalar(k).unwrap();
    let (uq, df, ba, uf) = (get("uniqueness_mean"), get("diffuseness_mean"), get("bit_aliasing_mean"), get("uniformity_mean"));
    let pass = (48.0..=52.0).contains(&uq)
        && (48.0..=52.0).contains(&df)
        && (45.0..=55.0).contains(&ba)
        && (47.0..=53.0).contains(&uf);
    outcome(
        pass,
        format!("UQ {uq:.2}% [48,52], DF {df:.2}% [48,52], BA {ba:.2}% [45,55], UF {uf:.2}% [47,53] (100 instances x 1000 x 64-bit)"),
    )
}

fn sac_improvement() -> Outcome {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Sac, 0x5ac);
    cfg.counts.instances = 10;
    cfg.counts.response_bits = 64;
    cfg.sac.worst_case_sets = 50;
    cfg.sac.hd_values = vec![1];
    let r = experiment::run(&cfg, None).unwrap();
    let get = |k: &str| r.scalar(k).unwrap();
    let (map_d, map_s) = (get("sac_max_dev_dual"), get("sac_max_dev_single"));
    let (uf_d, uf_s) = (
        get("uniformity_worst_dual_mean_abs_dev"),
        get("uniformity_worst_single_mean_abs_dev"),
    );
    let per_seed = get("sac_dual_closer_fraction");
    let hd1 = r.tables["sac_challenge"].rows[0][1];

    // Worst-case uniformity per seed as well.
    let instances = runner::build_instances(&cfg).unwrap();
    let dual = runner::worst_case_uniformity(&instances, &cfg, Architecture::Dual).unwrap();
    let single = runner::worst_case_uniformity(&instances, &cfg, Architecture::Single).unwrap();
    let dev = |xs: &[f64]| xs.iter().map(|x| (x - 50.0).abs()).sum::<f64>() / xs.len() as f64;
    let sets = cfg.sac.worst_case_sets;
    let uf_wins = dual
        .chunks(sets)
        .zip(single.chunks(sets))
        .filter(|(d, s)| dev(d) < dev(s))
        .count();
    let pass = map_d < map_s && uf_d < uf_s && per_seed == 1.0 && uf_wins == 10;
    outcome(
        pass,
        format!(
            "map max |rate-50| dual {map_d:.1} vs single {map_s:.1} (dual closer on {:.0}/10 seeds); worst-case UF mean |UF-50| dual {uf_d:.2} vs single {uf_s:.2} (dual closer on {uf_wins}/10 seeds); dual hd=1 transition rate {hd1:.1}%",
            per_seed * 10.0
        ),
    )
}

fn snr_trend() -> Outcome {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Snr, 0x5e);
    cfg.counts.instances = 10;
    cfg.sweep.dummy_counts = vec![0, 1, 2, 4, 8, 16, 32];
    cfg.sweep.trace_length = 2000;
    let r = experiment::run(&cfg, None).unwrap();
    let snr = r.tables["snr"].column("snr_mean").unwrap();
    let rho = r.scalar("snr_spearman").unwrap();
    let non_increasing = snr.windows(2).all(|w| w[1] <= w[0]);
    let shown: Vec<String> = snr.iter().map(|s| format!("{s:.4}")).collect();
    outcome(
        non_increasing && rho <= -0.9,
        format!(
            "mean SNR over dummy {{0,1,2,4,8,16,32}}: [{}]; non-increasing: {non_increasing}; Spearman {rho:.3} <= -0.9",
            shown.join(", ")
        ),
    )
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nrpuf")).args(args).output().expect("run nrpuf")
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(ExperimentKind::Metrics, 0xd0d0);
    cfg.puf.rows = 64;
    cfg.puf.cols = 64;
    cfg.counts.instances = 8;
    cfg.counts.challenges = 12;
    cfg.counts.trials = 3;
    cfg.sac.worst_case_sets = 4;
    let cfg_path = dir.path().join("config.json");
    std::fs::write(&cfg_path, cfg.to_json()).unwrap();

    let mut reports = Vec::new();
    for (run, workers) in [("a", "1"), ("b", "8"), ("c", "1")] {
        let out = dir.path().join(run);
        let status = run_cli(&[
            "run",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--workers",
            workers,
        ]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        reports.push(std::fs::read(out.join("report.json")).unwrap());
    }
    let reports_equal = reports.windows(2).all(|w| w[0] == w[1]);

    // Save in one process, evaluate in two others, compare with the in-memory instance.
    let inst = dir.path().join("puf.json");
    assert!(run_cli(&["save-instance", "--seed", "99", "--out", inst.to_str().unwrap()]).status.success());
    let puf = PufInstance::build(&PufConfig::default(), 99).unwrap();
    let loaded = experiment::load_instance(&inst).unwrap();
    let mut rng = Substreams::new(8).rng();
    let challenges: Vec<Challenge> = (0..100).map(|_| Challenge::random(&mut rng)).collect();
    let hex: Vec<String> = challenges.iter().map(|c| c.to_string()).collect();
    let mut args = vec!["eval", "--instance", inst.to_str().unwrap(), "--noise-free", "--challenge"];
    args.extend(hex.iter().map(String::as_str));
    let first = run_cli(&args).stdout;
    let second = run_cli(&args).stdout;
    let env = Environment::default();
    let expected: String = challenges
        .iter()
        .map(|&c| format!("{c} {}\n", u8::from(puf.evaluate_ideal(c, &env, Architecture::Dual).unwrap())))
        .collect();
    let bits_preserved = loaded == puf && first == second && first == expected.as_bytes();
    outcome(
        reports_equal && bits_preserved,
        format!(
            "reports byte-identical across processes and workers 1/8: {reports_equal}; save/load preserves all 100 evaluated bits: {bits_preserved}"
        ),
    )
}

fn power_sanity() -> Outcome {
    let puf = PufInstance::from_parts(
        DeviceParams::default(),
        CrossbarArray::uniform(2, 1, 1e15).unwrap(),
        CrossbarArray::uniform(2, 1, 1e15).unwrap(),
        CrossbarArray::uniform(1, 1, 100e3).unwrap(),
        ComparatorParams::ideal(),
        ComparatorParams::ideal(),
        PowerModel::quiet(),
        1,
        0,
    )
    .unwrap();
    let env = Environment::quiet();
    let mut rng = Substreams::new(0).rng();
    let base = puf.evaluate_bit(Challenge(1), &env, 0, &mut rng.clone()).unwrap().power;
    let with = puf.evaluate_bit(Challenge(1), &env, 1, &mut rng).unwrap().power;
    let contribution = with - base;
    outcome(
        (contribution - 100e-9).abs() < 1e-21,
        format!("100 kOhm device at 100 mV adds {:.6} nW (expected 100 nW)", contribution * 1e9),
    )
}

fn main() {
    // `cargo test -- --list` and similar harness probes expect no work.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("row-current spread scaling", row_current_scaling),
        ("CRP count", crp_space),
        ("metric oracle equivalence", metric_oracles),
        ("reliability trend", reliability_trend),
        ("HD/HW metric aggregates", hd_metrics),
        ("SAC improvement", sac_improvement),
        ("SNR monotonicity", snr_trend),
        ("determinism", determinism),
        ("power sanity", power_sanity),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("{tag} {} {name}: {} [{secs:.1} s]", k + 1, result.detail);
        failed += usize::from(!result.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
