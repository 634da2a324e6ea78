use nrpuf::experiment::{self, instance_from_str, instance_to_string, ExperimentConfig, ExperimentKind};
use nrpuf::puf::{expand_challenge, ArrayId, Architecture, Challenge, PufConfig, PufInstance};
use nrpuf::{CrossbarArray, DeviceParams, Environment, Substreams};
use proptest::prelude::*;

fn small_puf_config() -> PufConfig {
    PufConfig {
        rows: 24,
        cols: 24,
        dummy_rows: 6,
        dummy_cols: 6,
        ..Default::default()
    }
}

#[test]
fn ber_grows_with_sense_margin_and_falls_with_cs() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Reliability, 31);
    cfg.counts.instances = 8;
    cfg.counts.challenges = 150;
    cfg.counts.response_bits = 1;
    cfg.counts.trials = 20;
    cfg.sweep.cs_values = vec![1, 5];
    cfg.sweep.sense_margins = vec![0.0, 30e-9, 100e-9];
    let report = experiment::run(&cfg, None).unwrap();
    let grid = &report.tables["ber_grid"];
    let at = |cs: f64, m: f64| {
        grid.rows
            .iter()
            .find(|r| r[0] == cs && r[1] == m)
            .map(|r| r[2])
            .unwrap()
    };
    for cs in [1.0, 5.0] {
        assert!(at(cs, 0.0) <= at(cs, 30e-9) && at(cs, 30e-9) <= at(cs, 100e-9), "cs {cs}");
    }
    for m in [0.0, 30e-9, 100e-9] {
        assert!(at(5.0, m) < at(1.0, m), "margin {m}");
    }
}

#[test]
fn hidden_bit_reroutes_most_b_selections() {
    let mut rng = Substreams::new(17).rng();
    let changed = (0..500)
        .filter(|_| {
            let c = Challenge::random(&mut rng);
            let s0 = expand_challenge(c, Some(false), ArrayId::B, 5, (128, 128)).unwrap();
            let s1 = expand_challenge(c, Some(true), ArrayId::B, 5, (128, 128)).unwrap();
            s0 != s1
        })
        .count();
    assert!(changed >= 490, "{changed}");
}

#[test]
fn noise_free_dual_responses_are_balanced() {
    let puf = PufInstance::build(&PufConfig::default(), 8).unwrap();
    let env = Environment::default();
    let mut rng = Substreams::new(2).rng();
    let ones = (0..4000)
        .filter(|_| puf.evaluate_ideal(Challenge::random(&mut rng), &env, Architecture::Dual).unwrap())
        .count();
    assert!((1700..=2300).contains(&ones), "{ones}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_yields_valid_selections(
        bits: u64,
        hidden: bool,
        rows in 2usize..40,
        cols in 1usize..40,
        cs in 1usize..=5,
    ) {
        prop_assume!(cs <= cols);
        for (array, hidden) in [(ArrayId::A, None), (ArrayId::B, Some(hidden))] {
            let sel = expand_challenge(Challenge(bits), hidden, array, cs, (rows, cols)).unwrap();
            prop_assert!(sel.validate(rows, cols).is_ok());
            prop_assert_eq!(sel.columns.len(), cs);
            prop_assert_eq!(&sel, &expand_challenge(Challenge(bits), hidden, array, cs, (rows, cols)).unwrap());
        }
        prop_assert!(expand_challenge(Challenge(bits), None, ArrayId::B, cs, (rows, cols)).is_err());
    }

    #[test]
    fn quiet_row_current_is_sum_of_cells(seed: u64, cs in 1usize..=5) {
        let params = DeviceParams::default();
        let env = Environment::quiet();
        let op = env.nominal_point();
        let mut rng = Substreams::new(seed).rng();
        let array = CrossbarArray::build(2, 5, &params, &mut rng).unwrap();
        let cols: Vec<usize> = (0..cs).collect();
        let total = array.row_current(&params, 1, &cols, &env, &mut rng).unwrap();
        let sum: f64 = cols.iter().map(|&c| params.current_at(array.cell(1, c).unwrap(), &op)).sum();
        prop_assert!((total - sum).abs() <= 1e-12 * sum);
    }

    #[test]
    fn instance_text_round_trips(seed: u64) {
        let puf = PufInstance::build(&small_puf_config(), seed).unwrap();
        let back = instance_from_str(&instance_to_string(&puf)).unwrap();
        prop_assert_eq!(back, puf);
    }

    #[test]
    fn seeded_evaluation_is_deterministic(seed: u64, bits: u64, dummy in 0usize..=36) {
        let puf = PufInstance::build(&small_puf_config(), seed).unwrap();
        let env = Environment::default();
        let a = puf.evaluate(Challenge(bits), &env, dummy, Architecture::Dual, &mut Substreams::new(seed).rng()).unwrap();
        let b = puf.evaluate(Challenge(bits), &env, dummy, Architecture::Dual, &mut Substreams::new(seed).rng()).unwrap();
        prop_assert_eq!(a, b);
    }
}
