//! Selection-level avalanche maps for the dual and single architectures.

use nrpuf::metrics::{random_selection, sac_map};
use nrpuf::puf::{Architecture, PufConfig, PufInstance};
use nrpuf::{Environment, Substreams};

fn main() -> nrpuf::Result<()> {
    let cfg = PufConfig::default();
    let puf = PufInstance::build(&cfg, 5)?;
    let env = Environment::default();
    let mut rng = Substreams::new(9).rng();
    let reference = random_selection(cfg.cs, puf.dims(), &mut rng);

    for arch in [Architecture::Dual, Architecture::Single] {
        let map = sac_map(&puf, &env, &reference, 5, 2, 400, arch, &mut rng)?;
        println!("{arch:?}: transition rate (%) by replaced columns j and rows k");
        println!("  j\\k {:>7} {:>7} {:>7}", 0, 1, 2);
        for j in 0..=map.max_j() {
            let rates: Vec<String> = (0..=map.max_k()).map(|k| format!("{:>7.1}", map.rate(j, k))).collect();
            println!("  {j:>3} {}", rates.join(" "));
        }
        println!("  max |rate - 50| = {:.1}", map.max_deviation());
    }
    Ok(())
}
