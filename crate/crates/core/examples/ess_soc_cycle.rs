//! Drives the table flywheel with a steady charge request until the upper
//! band takes over, then shows the forced discharge bringing SoC back.
//!
//! cargo run --example ess_soc_cycle

use freqreg::ess::{EssParams, StorageFacility};

fn main() -> freqreg::Result<()> {
    let mut fess = StorageFacility::new(EssParams::fess_table1(), 0.6)?;
    let mut last_regime = String::new();
    for t in 0..3600 {
        let step = fess.step(-1.0)?;
        let flags = fess.state().flags;
        let regime = match (flags.a, flags.b) {
            (true, _) => "forced discharge",
            (_, true) => "forced charge",
            _ => "following set-point",
        };
        if regime != last_regime || t % 600 == 0 {
            println!(
                "t={t:>4} P={:>6.3} MW SoC={:.4} BPm={:>5.2} window=[{:>5.2}, {:>5.2}] {regime}",
                step.p_ess, step.soc, step.limits.bpm, step.limits.m_min, step.limits.m_max
            );
            last_regime = regime.to_string();
        }
        if let Some(bound) = step.soc_clamp {
            println!("t={t:>4} SoC clamped at {bound}");
        }
    }
    Ok(())
}
