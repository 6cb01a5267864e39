//! Storage size against SoC management: 30 MW and 80 MW fleets, each with
//! the SoC model on and off.
//!
//! cargo run --release --example soc_study

use freqreg::scenario::{sweep_ess, CapacitySpec, LoopConfig};

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
    let specs: Vec<CapacitySpec> = [
        "bess:0/0,fess:0/0",
        "bess:15/30,fess:15/3.75",
        "bess:40/80,fess:40/10",
    ]
    .iter()
    .map(|s| s.parse())
    .collect::<Result<_, _>>()?;
    for row in sweep_ess(&config, &inputs, &specs, &[true, false])? {
        println!(
            "{:<26} soc {:<3}  rmse {:>8.3}  mae {:>8.3}",
            row.spec,
            if row.soc_model { "on" } else { "off" },
            row.metrics.rmse,
            row.metrics.mae
        );
    }
    Ok(())
}
