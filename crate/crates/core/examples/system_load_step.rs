//! Open-loop interconnection response to a 100 MW load step, in both
//! integration modes.
//!
//! cargo run --example system_load_step

use freqreg::ace::BiasConstants;
use freqreg::system::{Integration, PowerInputs, SystemParams, SystemState};

fn main() -> freqreg::Result<()> {
    let bias = BiasConstants::from_per_tenth_hz(-248.2, -2760.0)?;
    let initial = PowerInputs {
        pd: 15_000.0,
        pgt: 15_000.0,
        ..Default::default()
    };
    for mode in [Integration::Increment, Integration::Deviation] {
        let params = SystemParams {
            integration: mode,
            ..Default::default()
        };
        let mut system = SystemState::new(params, bias, initial)?;
        let step = PowerInputs {
            pd: 15_100.0,
            ..initial
        };
        println!("{mode:?}");
        for t in 0..10 {
            let (f_a, ni_a) = system.step(&step)?;
            println!("  t={t} f_a={f_a:.6} Hz NI_a={ni_a:>9.3} MW");
        }
    }
    Ok(())
}
