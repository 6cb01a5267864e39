//! Records an hour of AGC output with the table gains, then fits kp and ki
//! back from it starting at the middle of their bounds.
//!
//! cargo run --release --example fit_parameters

use freqreg::estimation::{FitParameter, FitProblem, NelderMeadSettings};
use freqreg::scenario::{simulate, LoopConfig};

fn main() -> freqreg::Result<()> {
    let config = LoopConfig::load(
        concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/synthetic_day.toml"),
        &["duration=3600".to_string()],
    )?;
    let recorded = simulate(&config)?;
    let target = recorded.signal("sr").unwrap().values().to_vec();

    let problem = FitProblem::new(
        config,
        "sr".into(),
        target,
        vec![
            FitParameter {
                name: "agc.kp".into(),
                lower: 0.1,
                upper: 1.0,
            },
            FitParameter {
                name: "agc.ki".into(),
                lower: 0.005,
                upper: 0.05,
            },
        ],
        NelderMeadSettings::default(),
    )?;
    let fit = problem.fit()?;
    for (name, value) in &fit.parameters {
        println!("{name:<7} {value:.6}");
    }
    println!(
        "rmse {:.3e} after {} evaluations ({} iterations)",
        fit.objective,
        fit.evaluations,
        fit.trace.len()
    );
    Ok(())
}
