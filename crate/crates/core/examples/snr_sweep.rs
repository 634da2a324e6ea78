//! Power-trace SNR against the number of dummy cells; writes one trace as CSV.

use std::fs::File;

use nrpuf::power::{collect_traces, snr};
use nrpuf::puf::{Challenge, PufConfig, PufInstance};
use nrpuf::{Environment, Substreams};

fn main() -> nrpuf::Result<()> {
    let puf = PufInstance::build(&PufConfig::default(), 77)?;
    let env = Environment::default();
    let mut rng = Substreams::new(1).rng();
    let challenges: Vec<Challenge> = (0..2000).map(|_| Challenge::random(&mut rng)).collect();
    let streams = Substreams::new(2);

    println!("dummy  snr");
    for d in [0, 1, 2, 4, 8, 16, 32] {
        let trace = collect_traces(&puf, &challenges, &env, d, &streams)?;
        println!("{d:>5}  {:.4}", snr(&trace)?);
        if d == 8 {
            let path = std::env::temp_dir().join("nrpuf_trace_d8.csv");
            trace.write_csv(File::create(&path)?)?;
            println!("       trace written to {}", path.display());
        }
    }
    Ok(())
}
