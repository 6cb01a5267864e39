//! Communication delays scaled by 1, 0.5 and 0 on the synthetic day, with
//! and without storage.
//!
//! cargo run --release --example delay_study

use freqreg::scenario::{sweep_delays, LoopConfig};

fn main() -> freqreg::Result<()> {
    let config = LoopConfig::load(
        concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/synthetic_day.toml"),
        &[],
    )?;
    let inputs = config.inputs.resolve(
        &config.facilities,
        config.duration,
        config.seed,
        config.agc.rc,
    )?;
    let mut governors_only = config.clone();
    governors_only.facilities.clear();

    for (label, c) in [("governors only", &governors_only), ("with 30 MW storage", &config)] {
        println!("{label}");
        for row in sweep_delays(c, &inputs, &[1.0, 0.5, 0.0])? {
            let d = &row.delays;
            println!(
                "  factor {:<4} steps meas/sr/tg {}/{}/{}  rmse {:>8.3}  mae {:>8.3}",
                row.factor, d.measurement_to_cc, d.sr_to_tg, d.cd_tg, row.metrics.rmse, row.metrics.mae
            );
        }
    }
    Ok(())
}
