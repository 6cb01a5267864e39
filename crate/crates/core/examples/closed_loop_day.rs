//! One synthetic day with a 30 MW storage fleet; writes the result
//! directory (CSV, metrics, resolved config, events).
//!
//! cargo run --release --example closed_loop_day [out_dir]

use std::time::Instant;

use freqreg::scenario::{save_result, simulate, LoopConfig};

fn main() -> freqreg::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("freqreg-day"));
    let config = LoopConfig::load(
        concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/synthetic_day.toml"),
        &[],
    )?;
    let start = Instant::now();
    let result = simulate(&config)?;
    println!("{} steps in {:.2?}", result.len(), start.elapsed());
    println!("ACE rmse {:.3} MW, mae {:.3} MW", result.metrics.rmse, result.metrics.mae);
    for f in &config.facilities {
        let soc = result.signal(&format!("soc.{}", f.name)).unwrap().values();
        let (lo, hi) = soc
            .iter()
            .fold((1.0f64, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        println!("{:<5} SoC range [{lo:.3}, {hi:.3}]", f.name);
    }
    println!("{} events", result.events.len());
    save_result(&result, &out)?;
    println!("written to {}", out.display());
    Ok(())
}
