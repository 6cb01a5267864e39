//! ACE histogram of the synthetic day in 10 MW bins, written as CSV.
//!
//! cargo run --release --example histogram_export [out.csv]

use freqreg::metrics::{histogram, write_histogram};
use freqreg::scenario::{simulate, LoopConfig};

fn main() -> freqreg::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("freqreg-ace-histogram.csv"));
    let config = LoopConfig::load(
        concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/synthetic_day.toml"),
        &[],
    )?;
    let result = simulate(&config)?;
    let bins = histogram(result.ace(), 10.0)?;
    let peak = bins.iter().max_by_key(|b| b.count).unwrap();
    println!(
        "{} bins, busiest [{:.1}, {:.1}) MW with {} samples",
        bins.len(),
        peak.left,
        peak.right,
        peak.count
    );
    write_histogram(&out, &bins)?;
    println!("written to {}", out.display());
    Ok(())
}
