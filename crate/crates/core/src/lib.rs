//! Discrete-time simulator of a balancing area's frequency-regulation loop
//! with flywheel and battery storage.
//!
//! The loop runs at 1 s and chains seven stages: area control error, ACE
//! filtering, AGC, aggregated turbine governors, storage set-points, the
//! storage facilities with SoC management, and the interconnection model
//! that closes the loop. Communication delays sit on every leg.
//!
//! Most work goes through [`scenario`]: load a [`scenario::LoopConfig`]
//! from TOML (facilities may start from the `fess-table1` / `bess-table1`
//! presets), resolve or supply [`scenario::InputTraces`], then
//! [`scenario::run`]. Sweeps over delay factors and storage sizes run in
//! parallel; [`estimation`] fits parameters back from recorded traces.
//!
//! ```no_run
//! use freqreg::scenario::{simulate, LoopConfig};
//!
//! let config = LoopConfig::load("scenarios/synthetic_day.toml", &[])?;
//! let result = simulate(&config)?;
//! println!("ACE rmse {:.2} MW", result.metrics.rmse);
//! # Ok::<(), freqreg::Error>(())
//! ```
//!
//! ## Examples
//!
//! ```text
//! examples/
//! ├── blocks_tour.rs         discrete blocks one by one
//! ├── ace_mlp.rs             ACE, SR_ESS and the f(IP) network
//! ├── agc_step_response.rs   filter, AGC and governors on an ACE step
//! ├── ess_soc_cycle.rs       a facility driven through its SoC bands
//! ├── system_load_step.rs    the interconnection model on a load step
//! ├── closed_loop_day.rs     one synthetic day, results to disk
//! ├── delay_study.rs         delay factors 1, 0.5, 0
//! ├── soc_study.rs           storage size with and without SoC management
//! ├── fit_parameters.rs      recover AGC gains from a recorded trace
//! └── histogram_export.rs    ACE histogram as CSV
//! ```
//!
//! The `frsim` binary exposes the same operations as subcommands.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ace;
pub mod agc;
pub mod blocks;
pub mod cli;
pub mod error;
pub mod ess;
pub mod estimation;
pub mod metrics;
pub mod mlp;
pub mod scenario;
pub mod series;
pub mod system;

pub use error::{Error, Result};
pub use series::{SampledSeries, Unit};
