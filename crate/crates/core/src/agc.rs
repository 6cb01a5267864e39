//! ACE filtering, the AGC controller and the aggregated
//! turbine-governor response.

use serde::{Deserialize, Serialize};

use crate::blocks::{
    seconds_to_steps, ButterworthFilter, DelayLine, DiscreteTransferFunction, PiClampController,
    RateLimiter, TfCoefficients,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgcParams {
    /// ACE filter gain.
    pub cf: f64,
    /// Pre-warp frequency, rad/s.
    pub omega0: f64,
    pub kp: f64,
    pub ki: f64,
    /// Contracted regulation capacity used when no RC trace is supplied, MW.
    pub rc: f64,
    /// MW/min.
    pub rate_limit: f64,
}

impl Default for AgcParams {
    fn default() -> Self {
        Self {
            cf: 0.974,
            omega0: 0.097,
            kp: 0.42,
            ki: 0.022,
            rc: 100.0,
            rate_limit: 50.0,
        }
    }
}

impl AgcParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rc >= 0.0) {
            return Err(Error::config(format!("agc.rc must be ≥ 0, got {}", self.rc)));
        }
        if !(self.rate_limit > 0.0) {
            return Err(Error::config(format!(
                "agc.rate_limit must be > 0, got {}",
                self.rate_limit
            )));
        }
        if !(self.omega0 > 0.0) {
            return Err(Error::config(format!(
                "agc.omega0 must be > 0, got {}",
                self.omega0
            )));
        }
        if ![self.cf, self.kp, self.ki].iter().all(|v| v.is_finite()) {
            return Err(Error::config("agc gains must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TgParams {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    /// Extra communication delay of the contracted fleet, s.
    pub cd_tg: f64,
    /// MW/min; shares the AGC bound unless set otherwise.
    pub rate_limit: f64,
}

impl Default for TgParams {
    fn default() -> Self {
        Self {
            num: vec![3.45, 0.0, 1.58],
            den: vec![3.78, 1.47, 0.0, 0.0],
            cd_tg: 30.0,
            rate_limit: 50.0,
        }
    }
}

impl TgParams {
    pub fn coefficients(&self) -> TfCoefficients {
        TfCoefficients::new(&self.num, &self.den)
    }

    pub fn validate(&self) -> Result<()> {
        DiscreteTransferFunction::new("TG(z)", &self.coefficients())?;
        if !(self.cd_tg >= 0.0) {
            return Err(Error::config(format!("tg.cd_tg must be ≥ 0, got {}", self.cd_tg)));
        }
        if !(self.rate_limit > 0.0) {
            return Err(Error::config("tg.rate_limit must be > 0"));
        }
        Ok(())
    }
}

/// One filtered ACE sample.
pub fn step_stage2(filter: &mut ButterworthFilter, ace: f64) -> Result<f64> {
    filter.step(ace)
}

/// AGC output for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgcOutput {
    pub sr: f64,
    /// Output sits on ±RC.
    pub saturated: bool,
}

/// Negation → PI (clamped) → rate limiter → saturation at ±RC.
#[derive(Debug, Clone)]
pub struct AgcController {
    pi: PiClampController,
    limiter: RateLimiter,
}

impl AgcController {
    pub fn new(params: &AgcParams) -> Self {
        Self {
            pi: PiClampController::new(params.kp, params.ki, -params.rc, params.rc),
            limiter: RateLimiter::per_minute(params.rate_limit),
        }
    }

    pub fn step(&mut self, filtered_ace: f64, rc: f64) -> AgcOutput {
        let rc = rc.max(0.0);
        self.pi.set_bounds(-rc, rc);
        let u = self.pi.step(-filtered_ace);
        let limited = self.limiter.step(u);
        let sr = limited.clamp(-rc, rc);
        AgcOutput {
            sr,
            saturated: rc > 0.0 && sr.abs() >= rc,
        }
    }

    pub fn integrator(&self) -> f64 {
        self.pi.integrator()
    }
}

/// SR delayed by CD and CD_TG, shaped by TG(z), then rate limited.
#[derive(Debug, Clone)]
pub struct TurbineGovernors {
    cd: DelayLine,
    cd_tg: DelayLine,
    tf: DiscreteTransferFunction,
    limiter: RateLimiter,
}

impl TurbineGovernors {
    /// `cd_steps` is the control-center→fleet delay; `cd_tg_steps` the extra
    /// fleet delay. Both already quantized.
    pub fn new(params: &TgParams, cd_steps: usize, cd_tg_steps: usize) -> Result<Self> {
        Ok(Self {
            cd: DelayLine::new(cd_steps),
            cd_tg: DelayLine::new(cd_tg_steps),
            tf: DiscreteTransferFunction::new("TG(z)", &params.coefficients())?
                .with_steady_start(),
            limiter: RateLimiter::per_minute(params.rate_limit),
        })
    }

    pub fn from_seconds(params: &TgParams, cd_seconds: f64) -> Result<Self> {
        Self::new(
            params,
            seconds_to_steps(cd_seconds),
            seconds_to_steps(params.cd_tg),
        )
    }

    pub fn total_delay(&self) -> usize {
        self.cd.delay_steps() + self.cd_tg.delay_steps()
    }

    pub fn step(&mut self, sr: f64) -> Result<f64> {
        let delayed = self.cd_tg.step(self.cd.step(sr));
        let shaped = self.tf.step(delayed)?;
        Ok(self.limiter.step(shaped))
    }
}
