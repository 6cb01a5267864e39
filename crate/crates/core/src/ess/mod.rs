//! Set-point calculation and the storage facility model with
//! SoC management.
//!
//! Sign conventions: `P_ESS > BP` is discharge (energy leaves the facility),
//! `P_ESS < BP` is charge. The SoC integrates `P_ESS·K` with `K < 0`.

mod correction;
mod params;

pub use correction::{correction_factor_bess, correction_factor_fess, Latches};
pub use params::{EssKind, EssParams, PRESET_BESS, PRESET_FESS};

use crate::blocks::{DiscreteTransferFunction, RateLimiter, SrLatch};
use crate::error::Result;

/// Inputs of the set-point calculation, as seen at the control center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetpointInputs {
    pub av: bool,
    pub rc: f64,
    pub sr_ess: f64,
    pub m_max: f64,
    pub m_min: f64,
    pub bpm: f64,
}

/// Scales the regulation request into the facility's reported window:
/// `SP = ½(M̄ − M̲)·clip(SR_ESS, ±RC)/RC + BPm`. An unavailable facility or a
/// zero RC yields `SP = BPm`.
pub fn compute_setpoint(inputs: &SetpointInputs) -> f64 {
    let SetpointInputs {
        av,
        rc,
        sr_ess,
        m_max,
        m_min,
        bpm,
    } = *inputs;
    if !av || rc == 0.0 {
        return bpm;
    }
    let ratio = if sr_ess >= 0.0 {
        sr_ess.min(rc) / rc
    } else {
        sr_ess.max(-rc) / rc
    };
    0.5 * (m_max - m_min) * ratio + bpm
}

/// SoC band indicators.
///
/// `a`/`b`: forced discharge/charge with hysteresis between the on and off
/// thresholds. `c`/`d`: hard gates, charging blocked at or above `u_on`,
/// discharging blocked at or below `l_on`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BandFlags {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
}

pub fn update_band_flags(prev: BandFlags, soc: f64, p: &EssParams) -> BandFlags {
    let a = if soc >= p.u_on {
        true
    } else if soc <= p.u_off {
        false
    } else {
        prev.a
    };
    let b = if a {
        false
    } else if soc <= p.l_on {
        true
    } else if soc >= p.l_off {
        false
    } else {
        prev.b
    };
    BandFlags {
        a,
        b,
        c: soc >= p.u_on,
        d: soc <= p.l_on,
    }
}

/// Moving base-point and the reported capacity window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub bpm: f64,
    pub m_max: f64,
    pub m_min: f64,
}

pub fn compute_limits(flags: BandFlags, p: &EssParams) -> Limits {
    let (bp, pc) = (p.bp, p.pc);
    if flags.a {
        Limits {
            bpm: bp + pc,
            m_max: bp + pc,
            m_min: bp,
        }
    } else if flags.b {
        Limits {
            bpm: bp - pc,
            m_max: bp,
            m_min: bp - pc,
        }
    } else {
        Limits {
            bpm: bp,
            m_max: bp + 0.5 * pc,
            m_min: bp - 0.5 * pc,
        }
    }
}

/// Set/reset inputs for the two correction latches at a given SoC.
pub fn latch_inputs(soc: f64, p: &EssParams) -> ((bool, bool), (bool, bool)) {
    (
        (soc >= p.ks_up, soc <= p.kr_up),
        (soc <= p.ks_dw, soc >= p.kr_dw),
    )
}

/// Output target before slew limiting. Requests that the SoC state forbids
/// fall back to the moving base-point; the result always lies inside the
/// rated envelope `[bp − pc, bp + pc]`.
pub fn select_target(sp: f64, flags: BandFlags, limits: Limits, p: &EssParams) -> f64 {
    let request = sp - p.bp;
    let blocked =
        (request < 0.0 && (flags.c || flags.a)) || (request > 0.0 && (flags.d || flags.b));
    let target = if blocked { limits.bpm } else { sp };
    target.clamp(p.bp - p.pc, p.bp + p.pc)
}

/// One facility's evolving state.
#[derive(Debug, Clone)]
pub struct EssState {
    pub soc: f64,
    pub flags: BandFlags,
    pub k_up: SrLatch,
    pub k_dw: SrLatch,
    pub p_out: f64,
    pub limits: Limits,
}

/// What happened in one facility step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacilityStep {
    pub p_ess: f64,
    /// SoC after the step.
    pub soc: f64,
    pub limits: Limits,
    /// `Some(bound)` if the SoC update had to be clamped to 0 or 1.
    pub soc_clamp: Option<f64>,
}

/// A storage facility: parameters, state and the charge/discharge filters.
#[derive(Debug, Clone)]
pub struct StorageFacility {
    params: EssParams,
    state: EssState,
    slew: RateLimiter,
    charge: DiscreteTransferFunction,
    discharge: DiscreteTransferFunction,
    soc_model: bool,
}

impl StorageFacility {
    pub fn new(params: EssParams, initial_soc: f64) -> Result<Self> {
        params.validate()?;
        if !(0.0..=1.0).contains(&initial_soc) {
            return Err(crate::error::Error::config(format!(
                "initial SoC must lie in [0, 1], got {initial_soc}"
            )));
        }
        let charge =
            DiscreteTransferFunction::new_stable("C(z)", &params.charge_tf())?.with_steady_start();
        let discharge = DiscreteTransferFunction::new_stable("D(z)", &params.discharge_tf())?
            .with_steady_start();
        let flags = update_band_flags(BandFlags::default(), initial_soc, &params);
        let ((s_up, _), (s_dw, _)) = latch_inputs(initial_soc, &params);
        let state = EssState {
            soc: initial_soc,
            flags,
            k_up: SrLatch::new(s_up),
            k_dw: SrLatch::new(s_dw),
            p_out: params.bp,
            limits: compute_limits(flags, &params),
        };
        let slew = RateLimiter::new(params.rsr, params.fsr).with_initial(params.bp);
        Ok(Self {
            params,
            state,
            slew,
            charge,
            discharge,
            soc_model: true,
        })
    }

    /// With the SoC model off the facility follows its set-point inside the
    /// rated envelope and slew limits; the SoC is still tracked for reporting.
    pub fn with_soc_model(mut self, enabled: bool) -> Self {
        self.soc_model = enabled;
        if !enabled {
            self.state.flags = BandFlags::default();
            self.state.limits = compute_limits(self.state.flags, &self.params);
        }
        self
    }

    pub fn params(&self) -> &EssParams {
        &self.params
    }

    pub fn state(&self) -> &EssState {
        &self.state
    }

    pub fn soc_model(&self) -> bool {
        self.soc_model
    }

    /// The window last reported to the control center.
    pub fn limits(&self) -> Limits {
        self.state.limits
    }

    fn latches(&self) -> Latches {
        Latches {
            k_up: self.state.k_up.q(),
            k_dw: self.state.k_dw.q(),
        }
    }

    /// Advances the facility by one step given the (delayed) set-point.
    pub fn step(&mut self, sp_delayed: f64) -> Result<FacilityStep> {
        let p = &self.params;
        let soc = self.state.soc;

        if self.soc_model {
            self.state.flags = update_band_flags(self.state.flags, soc, p);
        }
        let ((s_up, r_up), (s_dw, r_dw)) = latch_inputs(soc, p);
        self.state.k_up.step(s_up, r_up);
        self.state.k_dw.step(s_dw, r_dw);
        let limits = compute_limits(self.state.flags, p);
        self.state.limits = limits;

        let target = select_target(sp_delayed, self.state.flags, limits, p);
        let p_ess = self.slew.step(target);
        self.state.p_out = p_ess;

        let increment = self.energy_increment(p_ess, limits)?;
        let raw = soc + increment / self.params.e_cap;
        let clamped = raw.clamp(0.0, 1.0);
        let soc_clamp = (clamped != raw).then_some(clamped);
        self.state.soc = clamped;

        Ok(FacilityStep {
            p_ess,
            soc: clamped,
            limits,
            soc_clamp,
        })
    }

    /// Corrected energy change for this step, MWh.
    fn energy_increment(&mut self, p_ess: f64, limits: Limits) -> Result<f64> {
        let p = &self.params;
        let energy = p_ess * p.k;
        let in_c = self.charge.step(energy)?;
        let in_d = self.discharge.step(energy)?;
        let latches = self.latches();
        let (cf_c, cf_d) = match p.kind {
            EssKind::Fess => correction_factor_fess(in_c, in_d, latches, p, p_ess == limits.bpm),
            EssKind::Bess => correction_factor_bess(in_c, in_d, latches, self.state.soc, p),
        };
        let charging = p_ess < p.bp;
        let discharging = p_ess > p.bp;
        let mut increment = 0.0;
        if charging {
            increment += cf_c * p.eta;
        }
        if discharging {
            increment += cf_d / p.eta;
        }
        Ok(increment)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::TfCoefficients;

    fn identity_params(kind: EssKind) -> EssParams {
        let base = match kind {
            EssKind::Fess => EssParams::fess_table1(),
            EssKind::Bess => EssParams::bess_table1(),
        };
        let id = TfCoefficients::identity();
        EssParams {
            c_num: id.num.clone(),
            c_den: id.den.clone(),
            d_num: id.num.clone(),
            d_den: id.den,
            cf1_c: 1.0,
            cf2_c: 1.0,
            cf1_d: 1.0,
            cf2_d: 1.0,
            cf_eq: Some(1.0),
            rsr: 100.0,
            fsr: -100.0,
            ..base
        }
    }

    #[test]
    fn setpoint_examples() {
        let base = SetpointInputs {
            av: true,
            rc: 100.0,
            sr_ess: 50.0,
            m_max: 1.0,
            m_min: -1.0,
            bpm: 0.0,
        };
        assert!((compute_setpoint(&base) - 0.5).abs() < 1e-12);
        let over = SetpointInputs {
            sr_ess: 200.0,
            ..base
        };
        assert_eq!(compute_setpoint(&over), 1.0);
        let under = SetpointInputs {
            sr_ess: -200.0,
            ..base
        };
        assert_eq!(compute_setpoint(&under), -1.0);
        let idle = SetpointInputs {
            sr_ess: 0.0,
            bpm: 0.3,
            ..base
        };
        assert_eq!(compute_setpoint(&idle), 0.3);
    }

    #[test]
    fn setpoint_undefined_cases_fall_back_to_bpm() {
        let base = SetpointInputs {
            av: false,
            rc: 100.0,
            sr_ess: 50.0,
            m_max: 1.0,
            m_min: -1.0,
            bpm: 0.2,
        };
        assert_eq!(compute_setpoint(&base), 0.2);
        let zero_rc = SetpointInputs {
            av: true,
            rc: 0.0,
            ..base
        };
        assert_eq!(compute_setpoint(&zero_rc), 0.2);
    }

    fn trace_a(socs: &[f64], p: &EssParams) -> Vec<bool> {
        let mut flags = BandFlags::default();
        socs.iter()
            .map(|&s| {
                flags = update_band_flags(flags, s, p);
                flags.a
            })
            .collect()
    }

    #[test]
    fn upper_band_hysteresis() {
        let p = EssParams::fess_table1();
        assert_eq!(
            trace_a(&[0.9, 1.0, 0.8, 0.74], &p),
            vec![false, true, true, false]
        );
    }

    #[test]
    fn lower_band_hysteresis() {
        let p = EssParams::fess_table1();
        let mut flags = BandFlags::default();
        let b: Vec<bool> = [0.1, 0.0, 0.2, 0.26]
            .iter()
            .map(|&s| {
                flags = update_band_flags(flags, s, &p);
                flags.b
            })
            .collect();
        assert_eq!(b, vec![false, true, true, false]);
    }

    #[test]
    fn middle_band_no_flags() {
        let p = EssParams::fess_table1();
        let f = update_band_flags(BandFlags::default(), 0.5, &p);
        assert_eq!(f, BandFlags::default());
    }

    #[test]
    fn limits_three_cases() {
        let p = EssParams::fess_table1();
        let l = compute_limits(BandFlags::default(), &p);
        assert_eq!((l.bpm, l.m_max, l.m_min), (0.0, 1.0, -1.0));
        let a = BandFlags {
            a: true,
            ..Default::default()
        };
        let l = compute_limits(a, &p);
        assert_eq!((l.bpm, l.m_max, l.m_min), (2.0, 2.0, 0.0));
        let b = BandFlags {
            b: true,
            ..Default::default()
        };
        let l = compute_limits(b, &p);
        assert_eq!((l.bpm, l.m_max, l.m_min), (-2.0, 0.0, -2.0));
    }

    #[test]
    fn latch_threshold_traces() {
        let p = EssParams::fess_table1();
        let mut k_up = SrLatch::default();
        let trace: Vec<bool> = [0.9, 1.0, 0.7, 0.54]
            .iter()
            .map(|&s| {
                let ((set, reset), _) = latch_inputs(s, &p);
                k_up.step(set, reset)
            })
            .collect();
        assert_eq!(trace, vec![false, true, true, false]);

        let p = EssParams::bess_table1();
        let mut k_up = SrLatch::default();
        let trace: Vec<bool> = [0.88, 0.885, 0.8845, 0.884]
            .iter()
            .map(|&s| {
                let ((set, reset), _) = latch_inputs(s, &p);
                k_up.step(set, reset)
            })
            .collect();
        assert_eq!(trace, vec![false, true, true, false]);

        let mut k_dw = SrLatch::new(true);
        let ((_, _), (s, r)) = latch_inputs(0.5, &EssParams::fess_table1());
        // 0.5 is between ks_dw = 0 and kr_dw = 0.6: hold
        assert!(k_dw.step(s, r));
    }

    #[test]
    fn output_ramps_with_slew() {
        let mut f = StorageFacility::new(EssParams::fess_table1(), 0.5).unwrap();
        let out: Vec<f64> = (0..4).map(|_| f.step(1.5).unwrap().p_ess).collect();
        assert!((out[0] - 0.6).abs() < 1e-12);
        assert!((out[1] - 1.2).abs() < 1e-12);
        assert_eq!(out[2], 1.5);
        assert_eq!(out[3], 1.5);
    }

    #[test]
    fn sp_at_bp_settles_at_bp() {
        let mut f = StorageFacility::new(EssParams::fess_table1(), 0.5).unwrap();
        for _ in 0..5 {
            f.step(1.0).unwrap();
        }
        let mut last = 1.0;
        for _ in 0..10 {
            last = f.step(0.0).unwrap().p_ess;
        }
        assert_eq!(last, 0.0);
    }

    #[test]
    fn closed_discharge_gate_falls_back_to_bpm() {
        let mut f = StorageFacility::new(identity_params(EssKind::Fess), 0.0).unwrap();
        let step = f.step(1.5).unwrap();
        assert!(f.state().flags.d && f.state().flags.b);
        // forced-charge regime: target is BPm = bp − pc, not the discharge request
        assert_eq!(step.limits.bpm, -2.0);
        assert_eq!(step.p_ess, -2.0);
        assert!(step.soc > 0.0);
    }

    #[test]
    fn coulomb_counting_arithmetic() {
        let mut f = StorageFacility::new(identity_params(EssKind::Fess), 0.0)
            .unwrap()
            .with_soc_model(false);
        let first = f.step(-2.0).unwrap();
        assert!((first.soc - 2.0 / 3600.0 / 0.5).abs() < 1e-15);
        let mut soc = first.soc;
        for _ in 1..900 {
            soc = f.step(-2.0).unwrap().soc;
        }
        assert!((soc - 1.0).abs() < 1e-9, "{soc}");

        let mut f = StorageFacility::new(identity_params(EssKind::Fess), 1.0)
            .unwrap()
            .with_soc_model(false);
        for _ in 0..900 {
            soc = f.step(2.0).unwrap().soc;
        }
        assert!(soc.abs() < 1e-9, "{soc}");
    }

    #[test]
    fn zero_power_keeps_soc() {
        let mut f = StorageFacility::new(EssParams::bess_table1(), 0.42).unwrap();
        for _ in 0..100 {
            assert_eq!(f.step(0.0).unwrap().soc, 0.42);
        }
    }

    #[test]
    fn clamp_is_reported() {
        let mut f = StorageFacility::new(identity_params(EssKind::Fess), 0.999)
            .unwrap()
            .with_soc_model(false);
        let clamps: Vec<_> = (0..10).filter_map(|_| f.step(-2.0).unwrap().soc_clamp).collect();
        assert!(!clamps.is_empty());
        assert!(clamps.iter().all(|&c| c == 1.0));
    }
}
