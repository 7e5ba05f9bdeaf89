//! Runs the default grid on the bundled fixture and prints match rates.

use std::time::Instant;

use poqa::market::{load_prices, statistics_of};
use poqa::sweep::{aggregate_match_rate, run_sweep, Algorithm, SweepGrid};

fn main() -> poqa::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/prices_2016h2.csv");
    let stats = statistics_of(&load_prices(path, None)?)?;
    let grid = SweepGrid::new(stats, 42);
    let t = Instant::now();
    let report = run_sweep(&grid)?;
    println!("{} records in {:.1?}", report.records.len(), t.elapsed());
    for e in &report.exact {
        println!("risk {:.1}: exact {} {:.6}", e.risk, e.bits, e.energy);
    }
    for m in &report.match_rates {
        println!("risk {:.1} {:>4}: {:5.1}%", m.risk, m.algorithm, m.percent);
    }
    for algo in [Algorithm::Vqe, Algorithm::Qaoa] {
        println!("{algo}: {:.1}%", aggregate_match_rate(&report, algo));
    }
    Ok(())
}
