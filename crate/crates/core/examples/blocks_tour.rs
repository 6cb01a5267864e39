//! Each discrete block on a short input, printed side by side.
//!
//! cargo run --example blocks_tour

use freqreg::blocks::{
    ButterworthFilter, DelayLine, DiscreteTransferFunction, PiClampController, RateLimiter,
    SrLatch, TfCoefficients,
};

fn main() -> freqreg::Result<()> {
    // aggregated governor TG(z) from the table presets
    let tg = TfCoefficients::new(&[3.45, 0.0, 1.58], &[3.78, 1.47, 0.0, 0.0]);
    println!("TG(z) dc gain {:.6}, stable {}", tg.dc_gain(), tg.is_stable());
    let mut tg = DiscreteTransferFunction::new_stable("TG(z)", &tg)?;

    let mut filter = ButterworthFilter::new(0.974, 0.097)?;
    let mut delay = DelayLine::with_fill(3, 0.0);
    let mut limiter = RateLimiter::per_minute(50.0);
    let mut pi = PiClampController::new(0.42, 0.022, -100.0, 100.0);
    let mut latch = SrLatch::default();

    println!(" t  input     TG(z)  filtered  delayed  limited       PI  latch");
    for t in 0..15 {
        let u = if t >= 2 { 100.0 } else { 0.0 };
        let q = latch.step(t == 4, t == 10);
        println!(
            "{t:>2} {u:>6.1} {:>9.3} {:>9.3} {:>8.1} {:>8.3} {:>8.3}  {}",
            tg.step(u)?,
            filter.step(u)?,
            delay.step(u),
            limiter.step(u),
            pi.step(u),
            q as u8
        );
    }
    Ok(())
}
