//! Challenge-response space for a few array shapes.

use nrpuf::puf::{crp_count, CrpFormula};

fn main() -> nrpuf::Result<()> {
    println!("{:>5} {:>5} {:>3} {:>22} {:>14}", "n", "m", "cs", "combinatorial", "closed form");
    for (n, m, cs) in [(32, 32, 3), (64, 64, 4), (128, 128, 5), (256, 256, 5)] {
        let exact = crp_count(n, m, cs, 1, CrpFormula::Eq5)?;
        let closed = crp_count(n, m, cs, 1, CrpFormula::Table1)?;
        println!("{n:>5} {m:>5} {cs:>3} {:>22} {:>14}", exact.to_string(), closed.to_string());
    }
    Ok(())
}
