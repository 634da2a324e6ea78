//! Saves an instance, reloads it and checks the responses agree.

use nrpuf::experiment::{load_instance, save_instance};
use nrpuf::puf::{Architecture, Challenge, PufConfig, PufInstance};
use nrpuf::{Environment, Substreams};

fn main() -> nrpuf::Result<()> {
    let puf = PufInstance::build(&PufConfig::default(), 123)?;
    let path = std::env::temp_dir().join("nrpuf_instance_123.json");
    save_instance(&puf, &path)?;
    let back = load_instance(&path)?;
    println!("saved to {} ({} bytes)", path.display(), std::fs::metadata(&path)?.len());

    let env = Environment::default();
    let mut rng = Substreams::new(0).rng();
    let mismatches = (0..1000)
        .map(|_| Challenge::random(&mut rng))
        .filter(|&c| puf.evaluate_ideal(c, &env, Architecture::Dual).ok() != back.evaluate_ideal(c, &env, Architecture::Dual).ok())
        .count();
    println!("identical instance: {}", back == puf);
    println!("mismatching responses over 1000 challenges: {mismatches}");
    Ok(())
}
