//! Actual frequency and net interchange from the power balance.

use serde::{Deserialize, Serialize};

use crate::ace::BiasConstants;
use crate::blocks::{DiscreteTransferFunction, TfCoefficients};
use crate::error::{Error, Result};

/// What the `1/(z−1)` terms accumulate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integration {
    /// Per-step change of the net power, `net_t − net_{t−1}`. The
    /// accumulated state equals the current imbalance, so frequency tracks
    /// the static interconnection response.
    #[default]
    Increment,
    /// Net power deviation from the scenario-initial values.
    Deviation,
}

/// Generation and load entering the balance, MW.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerInputs {
    pub pd: f64,
    pub pgt: f64,
    pub ptgr: f64,
    pub pfess: f64,
    pub pbess: f64,
}

impl PowerInputs {
    /// Surplus of generation over load.
    pub fn net(&self) -> f64 {
        -self.pd + self.pgt + self.ptgr + self.pfess + self.pbess
    }

    fn check(&self) -> Result<()> {
        for (name, v) in [
            ("P_D", self.pd),
            ("P_GT", self.pgt),
            ("P_TGr", self.ptgr),
            ("P_FESS", self.pfess),
            ("P_BESS", self.pbess),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    block: name.into(),
                    value: v,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Initial frequency, Hz.
    pub f0: f64,
    /// Initial net interchange, MW.
    pub ni0: f64,
    pub f_num: Vec<f64>,
    pub f_den: Vec<f64>,
    #[serde(default)]
    pub integration: Integration,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            f0: 60.0,
            ni0: 0.0,
            f_num: [0.51, -1.97, 2.31, 2.93, -1.18, -2.73]
                .iter()
                .map(|c| c * 1e-5)
                .collect(),
            f_den: vec![1.0, -0.45, -0.77, -0.23, 0.6, -0.12],
            integration: Integration::Increment,
        }
    }
}

impl SystemParams {
    pub fn f_coefficients(&self) -> TfCoefficients {
        TfCoefficients::new(&self.f_num, &self.f_den)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.f0.is_finite() || !self.ni0.is_finite() {
            return Err(Error::config("system.f0 and system.ni0 must be finite"));
        }
        DiscreteTransferFunction::new_stable("F(z)", &self.f_coefficients())?;
        Ok(())
    }
}

/// Evolving state of the interconnection model.
#[derive(Debug, Clone)]
pub struct SystemState {
    params: SystemParams,
    bias: BiasConstants,
    f_tf: DiscreteTransferFunction,
    initial: PowerInputs,
    prev_net: f64,
    integrator: f64,
    f_out: f64,
}

impl SystemState {
    pub fn new(params: SystemParams, bias: BiasConstants, initial: PowerInputs) -> Result<Self> {
        params.validate()?;
        initial.check()?;
        let f_tf = DiscreteTransferFunction::new_stable("F(z)", &params.f_coefficients())?;
        Ok(Self {
            prev_net: initial.net(),
            params,
            bias,
            f_tf,
            initial,
            integrator: 0.0,
            f_out: 0.0,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn initial(&self) -> PowerInputs {
        self.initial
    }

    pub fn integrator(&self) -> f64 {
        self.integrator
    }

    /// Frequency and interchange seen before any step has been taken.
    pub fn outputs(&self) -> (f64, f64) {
        self.current()
    }

    fn current(&self) -> (f64, f64) {
        let f_a = self.params.f0 - self.integrator / self.bias.b_ei() - self.f_out;
        let ni_a = self.params.ni0 + self.bias.interchange_share() * self.integrator;
        (f_a, ni_a)
    }

    /// Consumes the powers of step `t` and returns `(f_a, NI_a)` at `t+1`.
    /// The F(z) contribution is one sample behind the integrator term.
    pub fn step(&mut self, powers: &PowerInputs) -> Result<(f64, f64)> {
        powers.check()?;
        let net = powers.net();
        let deviation = net - self.initial.net();
        let drive = match self.params.integration {
            Integration::Increment => net - self.prev_net,
            Integration::Deviation => deviation,
        };
        self.prev_net = net;
        self.f_out = self.f_tf.step(deviation)?;
        self.integrator += drive;
        Ok(self.current())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bias() -> BiasConstants {
        BiasConstants::from_per_tenth_hz(-248.2, -2760.0).unwrap()
    }

    fn no_f(integration: Integration) -> SystemParams {
        SystemParams {
            f_num: vec![0.0],
            f_den: vec![1.0],
            integration,
            ..Default::default()
        }
    }

    #[test]
    fn table_f_is_stable_with_expected_gain() {
        let p = SystemParams::default();
        p.validate().unwrap();
        assert!((p.f_coefficients().dc_gain() + 1.3e-6 / 0.03).abs() < 1e-12);
    }

    #[test]
    fn one_step_surplus_raises_frequency() {
        for mode in [Integration::Increment, Integration::Deviation] {
            let mut s = SystemState::new(no_f(mode), bias(), PowerInputs::default()).unwrap();
            let (f, _) = s
                .step(&PowerInputs {
                    pgt: 1000.0,
                    ..Default::default()
                })
                .unwrap();
            assert!((f - 60.0 - 1000.0 / 27600.0).abs() < 1e-12);
            assert!((f - 60.03623).abs() < 1e-5);
        }
    }

    #[test]
    fn one_step_interchange() {
        let mut s = SystemState::new(no_f(Integration::Deviation), bias(), PowerInputs::default())
            .unwrap();
        let (_, ni) = s
            .step(&PowerInputs {
                pgt: 100.0,
                ..Default::default()
            })
            .unwrap();
        assert!((ni - 91.0072).abs() < 1e-3);
    }

    #[test]
    fn balanced_stays_exact() {
        let init = PowerInputs {
            pd: 15000.0,
            pgt: 14900.0,
            ptgr: 100.0,
            ..Default::default()
        };
        for mode in [Integration::Increment, Integration::Deviation] {
            let params = SystemParams {
                integration: mode,
                ..Default::default()
            };
            let mut s = SystemState::new(params, bias(), init).unwrap();
            for _ in 0..1000 {
                assert_eq!(s.step(&init).unwrap(), (60.0, 0.0));
            }
            assert_eq!(s.integrator(), 0.0);
        }
    }

    #[test]
    fn load_step_lowers_frequency() {
        let mut s =
            SystemState::new(SystemParams::default(), bias(), PowerInputs::default()).unwrap();
        let load = PowerInputs {
            pd: 100.0,
            ..Default::default()
        };
        let below = (0..5).any(|_| s.step(&load).unwrap().0 < 60.0);
        assert!(below);
    }

    #[test]
    fn non_finite_power_is_named() {
        let mut s =
            SystemState::new(SystemParams::default(), bias(), PowerInputs::default()).unwrap();
        let err = s
            .step(&PowerInputs {
                ptgr: f64::NAN,
                ..Default::default()
            })
            .unwrap_err();
        assert!(err.to_string().contains("P_TGr"));
    }
}
