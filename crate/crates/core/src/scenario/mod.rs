//! The closed loop: wiring of every stage, inputs, results and sweeps.
//!
//! Per step `t`:
//!
//! 1. measurements of `f_a`, `NI_a` reach the control center after
//!    `measurement_to_cc` steps;
//! 2. ACE and SR_ESS, filtered ACE, AGC regulation signal SR;
//! 3. SR travels to the fleet and through TG(z);
//! 4. per facility: the delayed BPm/M̄/M̲/AV readings and `−SR_ESS` give the
//!    set-point, which reaches the facility after `sp_to_ess` steps;
//! 5. the power balance advances `f_a`, `NI_a` to `t + 1`.

mod config;
mod io;
mod sweep;
mod traces;

pub use config::{
    apply_override, BiasConfig, Delays, FacilityConfig, LoopConfig, QuantizedDelays,
};
pub use io::{load_result, save_result, EVENTS_FILE, METRICS_FILE, CONFIG_FILE, RESULT_FILE};
pub use sweep::{sweep_delays, sweep_ess, CapacitySpec, DelayRow, EssRow};
pub use traces::{
    dispatch, load_traces, synthesize_load, InputSpec, InputTraces, LoadSpec, Ramp,
};

/// Named columns of a step-indexed CSV, `step` checked and dropped.
pub fn read_trace_columns(path: impl AsRef<std::path::Path>) -> Result<Vec<(String, Vec<f64>)>> {
    traces::read_columns(path.as_ref())
}

use serde::{Deserialize, Serialize};

use crate::ace::{compute_ace, compute_sr_ess, AceInputs, IpCorrection};
use crate::agc::{AgcController, TurbineGovernors};
use crate::blocks::{ButterworthFilter, DelayLine};
use crate::error::{Error, Result};
use crate::ess::{compute_setpoint, EssKind, SetpointInputs, StorageFacility};
use crate::metrics::Metrics;
use crate::mlp::MlpCorrection;
use crate::series::{SampledSeries, Unit};
use crate::system::{PowerInputs, SystemState};

/// Something worth knowing about that the loop handled by clamping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub step: usize,
    pub source: String,
    pub event: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub config: LoopConfig,
    pub delays: QuantizedDelays,
    /// Named signals in recording order, all `duration` long.
    pub signals: Vec<(String, SampledSeries)>,
    /// ACE against the ideal of 0 MW.
    pub metrics: Metrics,
    pub events: Vec<Event>,
}

impl SimulationResult {
    pub fn signal(&self, name: &str) -> Option<&SampledSeries> {
        self.signals.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn ace(&self) -> &[f64] {
        self.signal("ace").expect("ace is always recorded").values()
    }

    pub fn len(&self) -> usize {
        self.config.duration
    }

    pub fn is_empty(&self) -> bool {
        self.config.duration == 0
    }
}

/// Unit implied by a signal name.
pub fn unit_of(name: &str) -> Unit {
    let base = name.split('.').next().unwrap_or(name);
    match base {
        "f_a" | "f_s" => Unit::Hz,
        "soc" => Unit::Fraction,
        "av" => Unit::Dimensionless,
        _ => Unit::Mw,
    }
}

/// Resolves the configured inputs and runs.
pub fn simulate(config: &LoopConfig) -> Result<SimulationResult> {
    let inputs = config
        .inputs
        .resolve(&config.facilities, config.duration, config.seed, config.agc.rc)?;
    run(config, &inputs)
}

struct Recorder {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Recorder {
    fn new(names: Vec<String>, duration: usize) -> Self {
        let columns = names.iter().map(|_| Vec::with_capacity(duration)).collect();
        Self { names, columns }
    }

    fn push(&mut self, step: usize, values: &[f64]) -> Result<()> {
        for ((col, name), &v) in self.columns.iter_mut().zip(&self.names).zip(values) {
            if !v.is_finite() {
                return Err(Error::Diverged {
                    step,
                    signal: name.clone(),
                });
            }
            col.push(v);
        }
        Ok(())
    }

    fn finish(self) -> Vec<(String, SampledSeries)> {
        self.names
            .into_iter()
            .zip(self.columns)
            .map(|(n, c)| {
                let unit = unit_of(&n);
                (n, SampledSeries::from_trusted(c, unit))
            })
            .collect()
    }
}

struct FacilityLoop {
    name: String,
    kind: EssKind,
    unit: StorageFacility,
    bpm: DelayLine,
    m_max: DelayLine,
    m_min: DelayLine,
    av: DelayLine,
    sp: DelayLine,
    av_trace: Vec<f64>,
    clamped: bool,
}

fn column<'a>(s: &'a Option<SampledSeries>, name: &str) -> Result<&'a [f64]> {
    s.as_ref()
        .map(|s| s.values())
        .ok_or_else(|| Error::config(format!("input trace `{name}` was not resolved")))
}

fn at_step(step: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::NonFinite { block, .. } => Error::Diverged {
            step,
            signal: block,
        },
        other => other,
    }
}

/// Runs the closed loop over `inputs`. Deterministic: the same config and
/// inputs give bit-identical results.
pub fn run(config: &LoopConfig, inputs: &InputTraces) -> Result<SimulationResult> {
    config.validate()?;
    let n = config.duration;
    if inputs.len() != n {
        return Err(Error::LengthMismatch {
            left: inputs.len(),
            right: n,
        });
    }
    let bias = config.bias()?;
    let delays = config.quantized_delays();
    let pd = inputs.pd.values();
    let pgt = inputs.pgt.values();
    let ni_s = column(&inputs.ni_s, "ni_s")?;
    let f_s = column(&inputs.f_s, "f_s")?;
    let ip = column(&inputs.ip, "ip")?;
    let ime = column(&inputs.ime, "ime")?;
    let rc = column(&inputs.rc, "rc")?;

    let model = config
        .f_ip_weights
        .as_ref()
        .map(MlpCorrection::load)
        .transpose()?;
    let mut f_ip = IpCorrection::new(model);
    let mut filter = ButterworthFilter::new(config.agc.cf, config.agc.omega0)?;
    let mut agc = AgcController::new(&config.agc);
    let mut tg = TurbineGovernors::new(&config.tg, delays.sr_to_tg, delays.cd_tg)?;
    let mut f_meas = DelayLine::new(delays.measurement_to_cc);
    let mut ni_meas = DelayLine::new(delays.measurement_to_cc);

    let mut facilities = Vec::with_capacity(config.facilities.len());
    for (fc, &(sp_steps, meas_steps)) in config.facilities.iter().zip(&delays.facilities) {
        let unit = StorageFacility::new(fc.params.clone(), fc.initial_soc)?
            .with_soc_model(fc.soc_model);
        let av_trace = inputs
            .av
            .get(&fc.name)
            .map(|s| s.values().to_vec())
            .unwrap_or_else(|| vec![1.0; n]);
        if av_trace.len() != n {
            return Err(Error::LengthMismatch {
                left: av_trace.len(),
                right: n,
            });
        }
        facilities.push(FacilityLoop {
            name: fc.name.clone(),
            kind: fc.params.kind,
            unit,
            bpm: DelayLine::new(meas_steps),
            m_max: DelayLine::new(meas_steps),
            m_min: DelayLine::new(meas_steps),
            av: DelayLine::new(meas_steps),
            sp: DelayLine::new(sp_steps),
            av_trace,
            clamped: false,
        });
    }

    let ess_initial = |kind: EssKind| -> f64 {
        facilities
            .iter()
            .filter(|f| f.kind == kind)
            .map(|f| f.unit.state().p_out)
            .sum()
    };
    let initial = PowerInputs {
        pd: pd[0],
        pgt: pgt[0],
        ptgr: 0.0,
        pfess: ess_initial(EssKind::Fess),
        pbess: ess_initial(EssKind::Bess),
    };
    let mut system = SystemState::new(config.system.clone(), bias, initial)?;

    let mut names: Vec<String> = [
        "pd", "pgt", "f_a", "ni_a", "ace", "sr_ess", "ace_filtered", "sr", "ptgr",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for f in &facilities {
        for s in ["sp", "p", "soc", "bpm", "m_max", "m_min"] {
            names.push(format!("{s}.{}", f.name));
        }
    }
    let width = names.len();
    let mut rec = Recorder::new(names, n);
    let mut row = Vec::with_capacity(width);
    let mut events = Vec::new();
    let mut saturated = false;
    let (mut f_a, mut ni_a) = system.outputs();

    for t in 0..n {
        let err = at_step(t);
        row.clear();
        let measured = AceInputs {
            ni_a: ni_meas.step(ni_a),
            ni_s: ni_s[t],
            f_a: f_meas.step(f_a),
            f_s: f_s[t],
            ip: ip[t],
            ime: ime[t],
        };
        let correction = f_ip.step(ip[t]);
        let ace = compute_ace(&measured, &bias, correction);
        let sr_ess = compute_sr_ess(&measured, &bias, correction);
        let ace_filtered = filter.step(ace).map_err(&err)?;
        let agc_out = agc.step(ace_filtered, rc[t]);
        if agc_out.saturated && !saturated {
            events.push(Event {
                step: t,
                source: "agc".into(),
                event: "sr_saturated".into(),
                value: agc_out.sr,
            });
        }
        saturated = agc_out.saturated;
        let ptgr = tg.step(agc_out.sr).map_err(&err)?;
        row.extend_from_slice(&[
            pd[t],
            pgt[t],
            f_a,
            ni_a,
            ace,
            sr_ess,
            ace_filtered,
            agc_out.sr,
            ptgr,
        ]);

        let (mut pfess, mut pbess) = (0.0, 0.0);
        for f in &mut facilities {
            let reported = f.unit.limits();
            let sp = compute_setpoint(&SetpointInputs {
                av: f.av.step(f.av_trace[t]) == 1.0,
                rc: rc[t],
                sr_ess: -sr_ess,
                m_max: f.m_max.step(reported.m_max),
                m_min: f.m_min.step(reported.m_min),
                bpm: f.bpm.step(reported.bpm),
            });
            let out = f.unit.step(f.sp.step(sp)).map_err(&err)?;
            match out.soc_clamp {
                Some(bound) if !f.clamped => events.push(Event {
                    step: t,
                    source: f.name.clone(),
                    event: "soc_clamp".into(),
                    value: bound,
                }),
                _ => {}
            }
            f.clamped = out.soc_clamp.is_some();
            match f.kind {
                EssKind::Fess => pfess += out.p_ess,
                EssKind::Bess => pbess += out.p_ess,
            }
            row.extend_from_slice(&[
                sp,
                out.p_ess,
                out.soc,
                out.limits.bpm,
                out.limits.m_max,
                out.limits.m_min,
            ]);
        }
        rec.push(t, &row)?;

        (f_a, ni_a) = system
            .step(&PowerInputs {
                pd: pd[t],
                pgt: pgt[t],
                ptgr,
                pfess,
                pbess,
            })
            .map_err(&err)?;
    }

    let signals = rec.finish();
    let ace = &signals.iter().find(|(n, _)| n == "ace").expect("recorded").1;
    let metrics = Metrics::of_signal(ace.values())?;
    Ok(SimulationResult {
        config: config.clone(),
        delays,
        signals,
        metrics,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_facilities(duration: usize) -> LoopConfig {
        LoopConfig::from_toml_str(&format!(
            r#"
duration = {duration}
seed = 1
[[facility]]
name = "fess"
preset = "fess-table1"
[[facility]]
name = "bess"
preset = "bess-table1"
"#
        ))
        .unwrap()
    }

    fn flat(config: &LoopConfig) -> InputTraces {
        let mut spec = config.inputs.clone();
        spec.ime = 0.0;
        let names: Vec<&str> = config.facilities.iter().map(|f| f.name.as_str()).collect();
        InputTraces::equilibrium(15_000.0, config.duration, &spec, config.agc.rc, &names).unwrap()
    }

    #[test]
    fn equilibrium_is_flat() {
        let config = two_facilities(10);
        let r = run(&config, &flat(&config)).unwrap();
        assert!(r.ace().iter().all(|&a| a == 0.0));
        assert!(r.signal("f_a").unwrap().values().iter().all(|&f| f == 60.0));
        assert!(r.signal("soc.bess").unwrap().values().iter().all(|&s| s == 0.5));
        assert!(r.signal("p.fess").unwrap().values().iter().all(|&p| p == 0.0));
        assert_eq!(r.metrics.rmse, 0.0);
        assert!(r.events.is_empty());
    }

    #[test]
    fn storage_answers_before_governors() {
        let config = two_facilities(120);
        let mut inputs = flat(&config);
        let mut pd = inputs.pd.values().to_vec();
        for v in &mut pd[10..] {
            *v += 100.0;
        }
        inputs.pd = SampledSeries::new(pd, Unit::Mw).unwrap();
        let r = run(&config, &inputs).unwrap();
        let first = |name: &str| {
            r.signal(name)
                .unwrap()
                .values()
                .iter()
                .position(|&v| v != 0.0)
                .unwrap()
        };
        let ess = first("p.fess").min(first("p.bess"));
        let tg = first("ptgr");
        assert!(ess < tg, "ess {ess} tg {tg}");
        assert!(tg - 10 > 34);
    }

    #[test]
    fn deterministic() {
        let mut config = two_facilities(2000);
        config.inputs.load.sigma = 20.0;
        let a = simulate(&config).unwrap();
        let b = simulate(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn length_mismatch_rejected() {
        let config = two_facilities(10);
        let mut short = two_facilities(5);
        short.inputs = config.inputs.clone();
        let inputs = flat(&short);
        assert!(matches!(run(&config, &inputs), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn units_by_name() {
        assert_eq!(unit_of("f_a"), Unit::Hz);
        assert_eq!(unit_of("soc.fess"), Unit::Fraction);
        assert_eq!(unit_of("p.fess"), Unit::Mw);
    }
}
