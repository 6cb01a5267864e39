use serde::{Deserialize, Serialize};

use crate::blocks::{DiscreteTransferFunction, TfCoefficients};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EssKind {
    Fess,
    Bess,
}

/// Static description of one storage facility. Field names follow the
/// configuration file keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EssParams {
    pub kind: EssKind,
    /// Regulation power capacity (rated power), MW.
    pub pc: f64,
    /// Energy capacity, MWh.
    pub e_cap: f64,
    /// Fixed base-point, MW.
    pub bp: f64,
    /// Rising slew, MW per step.
    pub rsr: f64,
    /// Falling slew, MW per step (negative).
    pub fsr: f64,
    pub u_on: f64,
    pub u_off: f64,
    pub l_off: f64,
    pub l_on: f64,
    /// Power-to-energy factor, h/s.
    pub k: f64,
    pub c_num: Vec<f64>,
    pub c_den: Vec<f64>,
    pub d_num: Vec<f64>,
    pub d_den: Vec<f64>,
    pub cf1_c: f64,
    pub cf2_c: f64,
    pub cf1_d: f64,
    pub cf2_d: f64,
    /// Only used by flywheels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cf_eq: Option<f64>,
    pub ks_up: f64,
    pub kr_up: f64,
    pub ks_dw: f64,
    pub kr_dw: f64,
    pub eta: f64,
}

pub const PRESET_FESS: &str = "fess-table1";
pub const PRESET_BESS: &str = "bess-table1";

impl EssParams {
    /// 2 MW / 0.5 MWh flywheel.
    pub fn fess_table1() -> Self {
        Self {
            kind: EssKind::Fess,
            pc: 2.0,
            e_cap: 0.5,
            bp: 0.0,
            rsr: 0.6,
            fsr: -0.6,
            u_on: 1.0,
            u_off: 0.75,
            l_off: 0.25,
            l_on: 0.0,
            k: -1.0 / 3600.0,
            c_num: vec![4.23, 1.06, 2.8],
            c_den: vec![1.0, 0.57, 0.42],
            d_num: vec![5.57, 6.72, 3.02],
            d_den: vec![1.0, 0.72, 0.81],
            cf1_c: 1.22,
            cf2_c: 0.99,
            cf1_d: 1.19,
            cf2_d: 1.10,
            cf_eq: Some(0.35),
            ks_up: 1.0,
            kr_up: 0.55,
            ks_dw: 0.0,
            kr_dw: 0.60,
            eta: 1.0,
        }
    }

    /// 4 MW / 2.76 MWh battery.
    pub fn bess_table1() -> Self {
        Self {
            kind: EssKind::Bess,
            pc: 4.0,
            e_cap: 2.76,
            bp: 0.0,
            rsr: 1.28,
            fsr: -1.28,
            u_on: 0.885,
            u_off: 0.885,
            l_off: 0.125,
            l_on: 0.125,
            k: -1.0 / 3600.0,
            c_num: vec![0.16, 4.11, 7.52],
            c_den: vec![1.0, 0.93, 0.54],
            d_num: vec![2.88, 3.78, 4.57],
            d_den: vec![1.0, 0.48, 0.55],
            cf1_c: 0.014,
            cf2_c: 0.50,
            cf1_d: 0.51,
            cf2_d: 0.64,
            cf_eq: None,
            ks_up: 0.885,
            kr_up: 0.884,
            ks_dw: 0.125,
            kr_dw: 0.144,
            eta: 1.0,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            PRESET_FESS => Some(Self::fess_table1()),
            PRESET_BESS => Some(Self::bess_table1()),
            _ => None,
        }
    }

    /// Same facility with a different power/energy rating; slew rates scale
    /// with the power rating.
    pub fn resized(&self, pc: f64, e_cap: f64) -> Self {
        let scale = pc / self.pc;
        Self {
            pc,
            e_cap,
            rsr: self.rsr * scale,
            fsr: self.fsr * scale,
            ..self.clone()
        }
    }

    pub fn charge_tf(&self) -> TfCoefficients {
        TfCoefficients::new(&self.c_num, &self.c_den)
    }

    pub fn discharge_tf(&self) -> TfCoefficients {
        TfCoefficients::new(&self.d_num, &self.d_den)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::config(msg));
        if !(self.pc > 0.0) {
            return bad(format!("pc must be > 0, got {}", self.pc));
        }
        if !(self.e_cap > 0.0) {
            return bad(format!("e_cap must be > 0, got {}", self.e_cap));
        }
        if !(self.rsr > 0.0 && self.fsr < 0.0) {
            return bad(format!(
                "slew rates need rsr > 0 > fsr, got rsr = {}, fsr = {}",
                self.rsr, self.fsr
            ));
        }
        let bands = [0.0, self.l_on, self.l_off, self.u_off, self.u_on, 1.0];
        if bands.windows(2).any(|w| !(w[0] <= w[1])) || !(self.l_on < self.u_on) {
            return bad(format!(
                "SoC bands must satisfy 0 ≤ l_on ≤ l_off ≤ u_off ≤ u_on ≤ 1 with l_on < u_on, got {} {} {} {}",
                self.l_on, self.l_off, self.u_off, self.u_on
            ));
        }
        if self.eta != 1.0 {
            return bad(format!("eta must be 1 (facility compensates internally), got {}", self.eta));
        }
        if !(self.k < 0.0 && self.k.is_finite()) {
            return bad(format!("k must be negative, got {}", self.k));
        }
        if self.kind == EssKind::Fess && self.cf_eq.is_none() {
            return bad("flywheel parameters need cf_eq".into());
        }
        let scalars = [
            self.bp, self.cf1_c, self.cf2_c, self.cf1_d, self.cf2_d, self.ks_up, self.kr_up,
            self.ks_dw, self.kr_dw,
        ];
        if scalars.iter().chain(self.cf_eq.iter()).any(|v| !v.is_finite()) {
            return bad("non-finite facility parameter".into());
        }
        DiscreteTransferFunction::new_stable("C(z)", &self.charge_tf())?;
        DiscreteTransferFunction::new_stable("D(z)", &self.discharge_tf())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        EssParams::fess_table1().validate().unwrap();
        EssParams::bess_table1().validate().unwrap();
        assert!(EssParams::preset("nope").is_none());
    }

    #[test]
    fn charge_discharge_dc_gains() {
        let f = EssParams::fess_table1();
        assert!((f.charge_tf().dc_gain() - 8.09 / 1.99).abs() < 1e-12);
        assert!((f.discharge_tf().dc_gain() - 15.31 / 2.53).abs() < 1e-12);
        let b = EssParams::bess_table1();
        assert!((b.charge_tf().dc_gain() - 11.79 / 2.47).abs() < 1e-12);
        assert!((b.discharge_tf().dc_gain() - 11.23 / 2.03).abs() < 1e-12);
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut p = EssParams::fess_table1();
        p.e_cap = 0.0;
        assert!(p.validate().is_err());
        let mut p = EssParams::fess_table1();
        p.u_off = 0.2;
        assert!(p.validate().is_err());
        let mut p = EssParams::fess_table1();
        p.eta = 0.9;
        assert!(p.validate().is_err());
        let mut p = EssParams::bess_table1();
        p.c_den = vec![1.0, -2.1, 1.1];
        assert!(p.validate().is_err());
        let mut p = EssParams::fess_table1();
        p.cf_eq = None;
        assert!(p.validate().is_err());
    }

    #[test]
    fn resize_scales_slew() {
        let p = EssParams::fess_table1().resized(15.0, 3.75);
        assert_eq!(p.pc, 15.0);
        assert_eq!(p.e_cap, 3.75);
        assert!((p.rsr - 4.5).abs() < 1e-12);
        assert!((p.fsr + 4.5).abs() < 1e-12);
    }
}
