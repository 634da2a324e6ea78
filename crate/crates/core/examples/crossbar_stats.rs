//! Row-current spread against the number of selected columns.

use nrpuf::{combine_stats, CrossbarArray, DeviceParams, Environment, Substreams};

fn main() -> nrpuf::Result<()> {
    let env = Environment::quiet();
    let op = env.nominal_point();
    let params = DeviceParams {
        stuck_on_prob: 0.0,
        ..Default::default()
    }
    .with_hrs_current_sigma(132e-9, &op)?;
    let array = CrossbarArray::build(2000, 5, &params, &mut Substreams::new(1).rng())?;
    let single = params.cell_current_stats(&op);

    println!("cs  sampled_sigma_nA  analytic_sigma_nA");
    for cs in 1..=5 {
        let cols: Vec<usize> = (0..cs).collect();
        let currents = (0..array.rows())
            .map(|r| array.row_current_at(&params, r, &cols, &op))
            .collect::<nrpuf::Result<Vec<_>>>()?;
        let analytic = combine_stats(&vec![single; cs])?;
        println!(
            "{cs:>2}  {:>16.1}  {:>17.1}",
            nrpuf::stats::std_dev(&currents) * 1e9,
            analytic.std_dev() * 1e9
        );
    }
    Ok(())
}
