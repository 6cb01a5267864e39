//! A 100 MW ACE step through filtering, AGC and the delayed governor fleet.
//!
//! cargo run --example agc_step_response

use freqreg::agc::{step_stage2, AgcController, AgcParams, TgParams, TurbineGovernors};
use freqreg::blocks::ButterworthFilter;

fn main() -> freqreg::Result<()> {
    let agc_params = AgcParams::default();
    let mut filter = ButterworthFilter::new(agc_params.cf, agc_params.omega0)?;
    let mut agc = AgcController::new(&agc_params);
    let mut fleet = TurbineGovernors::from_seconds(&TgParams::default(), 4.0)?;
    println!("fleet delay {} steps", fleet.total_delay());

    let mut first_response = None;
    for t in 0..240 {
        let ace = if t >= 5 { 100.0 } else { 0.0 };
        let filtered = step_stage2(&mut filter, ace)?;
        let out = agc.step(filtered, agc_params.rc);
        let ptgr = fleet.step(out.sr)?;
        if ptgr != 0.0 && first_response.is_none() {
            first_response = Some(t);
        }
        if t % 20 == 0 || Some(t) == first_response {
            println!(
                "t={t:>3} filtered={filtered:>8.3} SR={:>8.3}{} P_TGr={ptgr:>8.3}",
                out.sr,
                if out.saturated { "*" } else { " " }
            );
        }
    }
    println!("governors first move at t = {}", first_response.unwrap_or(0));
    Ok(())
}
