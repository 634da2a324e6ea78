//! Samples manufactured cells and reads them under a fluctuating environment.

use nrpuf::{CellState, DeviceParams, Environment, Substreams};

fn main() -> nrpuf::Result<()> {
    let params = DeviceParams::default();
    params.validate()?;
    let env = Environment::default();
    let mut rng = Substreams::new(7).rng();

    let cells: Vec<_> = (0..10_000).map(|_| params.sample_cell(&mut rng)).collect();
    let stuck = cells.iter().filter(|c| c.state == CellState::StuckOn).count();
    println!("median HRS resistance: {:.0} ohm", params.median_hrs_resistance());
    println!("stuck-on fraction: {:.3}", stuck as f64 / cells.len() as f64);

    let op = env.nominal_point();
    let stats = params.cell_current_stats(&op);
    println!(
        "analytic cell current at {} V: mean {:.1} nA, sigma {:.1} nA",
        op.voltage,
        stats.mean * 1e9,
        stats.std_dev() * 1e9
    );

    let cell = cells[0];
    let reads: Vec<f64> = (0..5).map(|_| params.cell_current(&cell, &env, &mut rng)).collect();
    println!("cell 0 ({:?}, {:.0} ohm), five reads:", cell.state, cell.resistance);
    for i in reads {
        println!("  {:.2} nA", i * 1e9);
    }
    Ok(())
}
