//! Parallel studies over delay factors and storage capacities. Runs share
//! the same inputs; rows come back in spec order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::Metrics;

use super::{run, InputTraces, LoopConfig, QuantizedDelays};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayRow {
    pub factor: f64,
    pub delays: QuantizedDelays,
    pub metrics: Metrics,
}

/// One run per factor, every delay scaled and rounded half to even.
pub fn sweep_delays(
    base: &LoopConfig,
    inputs: &InputTraces,
    factors: &[f64],
) -> Result<Vec<DelayRow>> {
    let configs = factors
        .iter()
        .map(|&factor| {
            let mut c = base.clone();
            c.scale_delays(factor)?;
            Ok((factor, c))
        })
        .collect::<Result<Vec<_>>>()?;
    configs
        .into_par_iter()
        .map(|(factor, c)| {
            let r = run(&c, inputs)?;
            Ok(DelayRow {
                factor,
                delays: r.delays,
                metrics: r.metrics,
            })
        })
        .collect()
}

/// Power and energy capacity per named facility, written
/// `name:pc/e_cap[,name:pc/e_cap…]`. A facility sized `0/0` is removed.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacitySpec {
    pub facilities: Vec<(String, f64, f64)>,
}

impl FromStr for CapacitySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::config(format!("capacity spec `{s}` is not name:pc/e_cap[,…]"));
        let mut facilities = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, sizes) = part.split_once(':').ok_or_else(bad)?;
            let (pc, e_cap) = sizes.split_once('/').ok_or_else(bad)?;
            let pc: f64 = pc.trim().parse().map_err(|_| bad())?;
            let e_cap: f64 = e_cap.trim().parse().map_err(|_| bad())?;
            facilities.push((name.trim().to_string(), pc, e_cap));
        }
        if facilities.is_empty() {
            return Err(bad());
        }
        let spec = Self { facilities };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for CapacitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .facilities
            .iter()
            .map(|(n, pc, e)| format!("{n}:{pc}/{e}"))
            .collect();
        f.write_str(&parts.join(","))
    }
}

impl CapacitySpec {
    pub fn validate(&self) -> Result<()> {
        for (name, pc, e_cap) in &self.facilities {
            let removed = *pc == 0.0 && *e_cap == 0.0;
            if !removed && !(*pc > 0.0 && *e_cap > 0.0 && pc.is_finite() && e_cap.is_finite()) {
                return Err(Error::config(format!(
                    "facility `{name}`: capacities must be positive (or 0/0 to remove), got {pc}/{e_cap}"
                )));
            }
        }
        Ok(())
    }

    /// `base` with the named facilities resized or removed and the SoC model
    /// switched on or off everywhere.
    pub fn apply(&self, base: &LoopConfig, soc_model: bool) -> Result<LoopConfig> {
        self.validate()?;
        let mut c = base.clone();
        for (name, pc, e_cap) in &self.facilities {
            let idx = c
                .facilities
                .iter()
                .position(|f| &f.name == name)
                .ok_or_else(|| Error::config(format!("no facility named `{name}`")))?;
            if *pc == 0.0 {
                c.facilities.remove(idx);
            } else {
                let f = &mut c.facilities[idx];
                f.params = f.params.resized(*pc, *e_cap);
            }
        }
        for f in &mut c.facilities {
            f.soc_model = soc_model;
        }
        c.validate()?;
        Ok(c)
    }

    /// Total regulation capacity, MW.
    pub fn total_pc(&self) -> f64 {
        self.facilities.iter().map(|(_, pc, _)| pc).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EssRow {
    pub spec: String,
    pub soc_model: bool,
    pub metrics: Metrics,
}

/// One run per (spec, SoC flag) pair, specs outermost.
pub fn sweep_ess(
    base: &LoopConfig,
    inputs: &InputTraces,
    specs: &[CapacitySpec],
    soc_modes: &[bool],
) -> Result<Vec<EssRow>> {
    let configs = specs
        .iter()
        .flat_map(|s| soc_modes.iter().map(move |&m| (s, m)))
        .map(|(s, m)| Ok((s.to_string(), m, s.apply(base, m)?)))
        .collect::<Result<Vec<_>>>()?;
    configs
        .into_par_iter()
        .map(|(spec, soc_model, c)| {
            let r = run(&c, inputs)?;
            Ok(EssRow {
                spec,
                soc_model,
                metrics: r.metrics,
            })
        })
        .collect()
}
