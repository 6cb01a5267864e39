//! Area control error, the storage regulation signal, and the f(IP)
//! correction network round-tripped through its binary weight format.
//!
//! cargo run --example ace_mlp

use freqreg::ace::{compute_ace, compute_sr_ess, AceInputs, BiasConstants, IpCorrection};
use freqreg::mlp::{MlpCorrection, HIDDEN};

fn main() -> freqreg::Result<()> {
    let bias = BiasConstants::from_per_tenth_hz(-248.2, -2760.0)?;
    let inputs = AceInputs {
        ni_a: 720.0,
        ni_s: 700.0,
        f_a: 59.98,
        f_s: 60.0,
        ip: 10.0,
        ime: -35.0,
    };
    inputs.validate()?;
    println!("B = {} MW/Hz, B_EI = {} MW/Hz", bias.b_ba(), bias.b_ei());
    println!("ACE    = {:.3} MW", compute_ace(&inputs, &bias, 0.0));
    println!("SR_ESS = {:.3} MW", compute_sr_ess(&inputs, &bias, 0.0));

    // a small hand-made network: every unit looks at the IP difference
    let mut net = MlpCorrection::zeros([[-50.0, 50.0]; 3], [-20.0, 20.0]);
    for h in 0..HIDDEN {
        net.w1[h][2] = 0.5 + h as f64 / HIDDEN as f64;
        net.w2[0][h] = 1.0 / HIDDEN as f64;
    }
    let restored = MlpCorrection::from_bytes(&net.to_bytes())?;
    assert_eq!(restored, net);

    let mut f_ip = IpCorrection::new(Some(restored));
    for t in 0..14 {
        let ip = if t < 3 { 0.0 } else { 25.0 };
        println!("t={t:>2} IP={ip:>5.1}  f(IP)={:>8.4}", f_ip.step(ip));
    }
    Ok(())
}
