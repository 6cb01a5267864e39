use super::transfer_function::{DiscreteTransferFunction, TfCoefficients};
use crate::error::{Error, Result};
use crate::series::DT;

/// First-order low-pass Butterworth section scaled by `cf`, discretized with
/// the bilinear transform pre-warped at `omega0`.
///
/// The analog prototype `ω0 / (s + ω0)` maps to
/// `cf·k·(z + 1) / ((1 + k)·z + (k − 1))` with `k = tan(ω0·Δt / 2)`, so the
/// discrete magnitude is exactly `cf/√2` at `ω0`.
#[derive(Debug, Clone)]
pub struct ButterworthFilter {
    cf: f64,
    omega0: f64,
    tf: DiscreteTransferFunction,
}

impl ButterworthFilter {
    pub fn new(cf: f64, omega0: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0 * DT < std::f64::consts::PI) {
            return Err(Error::config(format!(
                "butterworth: omega0 must lie in (0, π/Δt), got {omega0}"
            )));
        }
        if !cf.is_finite() {
            return Err(Error::config("butterworth: non-finite gain"));
        }
        let coeffs = Self::coefficients(cf, omega0);
        let tf = DiscreteTransferFunction::new("ACE filter", &coeffs)?.with_steady_start();
        Ok(Self { cf, omega0, tf })
    }

    /// Discrete coefficients in descending powers of z.
    pub fn coefficients(cf: f64, omega0: f64) -> TfCoefficients {
        let k = (omega0 * DT / 2.0).tan();
        TfCoefficients::new(&[cf * k, cf * k], &[1.0 + k, k - 1.0])
    }

    pub fn cf(&self) -> f64 {
        self.cf
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Pole of the discrete section, `(1 − k) / (1 + k)`.
    pub fn pole(&self) -> f64 {
        let k = (self.omega0 * DT / 2.0).tan();
        (1.0 - k) / (1.0 + k)
    }

    pub fn step(&mut self, u: f64) -> Result<f64> {
        self.tf.step(u)
    }
}
