//! Area control error and the ESS regulation signal.

use crate::blocks::DelayLine;
use crate::error::{Error, Result};
use crate::mlp::MlpCorrection;

/// Balancing-area and interconnection frequency biases, held in MW/Hz
/// (i.e. already multiplied by ten relative to the usual MW/0.1 Hz quote).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasConstants {
    b_ba: f64,
    b_ei: f64,
}

impl BiasConstants {
    /// From values quoted in MW/0.1 Hz, e.g. `(-248.2, -2760.0)`.
    pub fn from_per_tenth_hz(b_ba: f64, b_ei: f64) -> Result<Self> {
        Self::from_mw_per_hz(10.0 * b_ba, 10.0 * b_ei)
    }

    pub fn from_mw_per_hz(b_ba: f64, b_ei: f64) -> Result<Self> {
        if !(b_ba < 0.0 && b_ei < 0.0) {
            return Err(Error::config(format!(
                "frequency biases must be negative (got B = {b_ba}, B_EI = {b_ei} MW/Hz)"
            )));
        }
        if b_ei.abs() <= b_ba.abs() {
            return Err(Error::config(format!(
                "interconnection bias |{b_ei}| must exceed balancing-area bias |{b_ba}|"
            )));
        }
        Ok(Self { b_ba, b_ei })
    }

    /// 10·B in MW/Hz.
    pub fn b_ba(&self) -> f64 {
        self.b_ba
    }

    /// 10·B_EI in MW/Hz.
    pub fn b_ei(&self) -> f64 {
        self.b_ei
    }

    /// Fraction of a local imbalance that shows up on the tie-lines,
    /// `(B_EI − B) / B_EI`.
    pub fn interchange_share(&self) -> f64 {
        (self.b_ei - self.b_ba) / self.b_ei
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AceInputs {
    pub ni_a: f64,
    pub ni_s: f64,
    pub f_a: f64,
    pub f_s: f64,
    pub ip: f64,
    pub ime: f64,
}

impl AceInputs {
    pub fn validate(&self) -> Result<()> {
        let all = [self.ni_a, self.ni_s, self.f_a, self.f_s, self.ip, self.ime];
        if let Some(v) = all.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                block: "ACE inputs".into(),
                value: *v,
            });
        }
        for (name, f) in [("f_a", self.f_a), ("f_s", self.f_s)] {
            if !(55.0..=65.0).contains(&f) {
                return Err(Error::config(format!(
                    "{name} = {f} Hz outside the [55, 65] Hz sanity band"
                )));
            }
        }
        Ok(())
    }

    fn common(&self, bias: &BiasConstants, f_ip: f64) -> f64 {
        (self.ni_a - self.ni_s) - bias.b_ba() * (self.f_a - self.f_s) - self.ime - f_ip
    }
}

/// `ACE = (NI_a − NI_s) − 10B(f_a − f_s) − IME − IP − f(IP)`
pub fn compute_ace(inputs: &AceInputs, bias: &BiasConstants, f_ip: f64) -> f64 {
    inputs.common(bias, f_ip) - inputs.ip
}

/// Same as [`compute_ace`] without the inadvertent-payback term.
pub fn compute_sr_ess(inputs: &AceInputs, bias: &BiasConstants, f_ip: f64) -> f64 {
    inputs.common(bias, f_ip)
}

/// Stateful f(IP) evaluator: keeps the 10-sample IP history the network needs.
/// Without weights the correction is identically zero.
#[derive(Debug, Clone)]
pub struct IpCorrection {
    model: Option<MlpCorrection>,
    lag: DelayLine,
}

pub const IP_LAG_STEPS: usize = 10;

impl IpCorrection {
    pub fn new(model: Option<MlpCorrection>) -> Self {
        Self {
            model,
            lag: DelayLine::new(IP_LAG_STEPS),
        }
    }

    pub fn step(&mut self, ip: f64) -> f64 {
        let lagged = self.lag.step(ip);
        self.model.as_ref().map_or(0.0, |m| m.f_ip(ip, lagged))
    }
}
