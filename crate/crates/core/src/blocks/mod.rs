//! Discrete-time control primitives shared by every stage of the loop.
//!
//! All blocks run at a fixed 1 s step and own their state; a simulation
//! holds one instance of each and drives them in a fixed order.

mod butterworth;
mod delay;
mod latch;
mod pi;
pub mod poly;
mod rate_limiter;
mod transfer_function;

pub use butterworth::ButterworthFilter;
pub use delay::DelayLine;
pub use latch::SrLatch;
pub use pi::PiClampController;
pub use rate_limiter::RateLimiter;
pub use transfer_function::{DiscreteTransferFunction, TfCoefficients};

/// Rounds a duration in seconds to whole 1 s steps, ties to even.
pub fn seconds_to_steps(seconds: f64) -> usize {
    debug_assert!(seconds >= 0.0);
    seconds.round_ties_even().max(0.0) as usize
}
