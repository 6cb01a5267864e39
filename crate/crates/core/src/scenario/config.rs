//! Scenario configuration: one TOML file, facility blocks expanded from
//! presets, dotted-key overrides.
//!
//! ```toml
//! duration = 86400
//! seed = 7
//!
//! [biases]          # MW per 0.1 Hz
//! b_ba = -248.2
//! b_ei = -2760.0
//!
//! [delays]          # seconds
//! measurement_to_cc = 4
//! sr_to_tg = 4
//!
//! [[facility]]
//! name = "fess"
//! preset = "fess-table1"
//! pc = 15.0
//! e_cap = 3.75
//! ```
//!
//! Missing sections take their defaults. A facility block may name a preset
//! and override any of its fields; [`LoopConfig::to_toml`] writes every field
//! out explicitly, so a resolved file no longer depends on presets.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Value;

use crate::ace::BiasConstants;
use crate::agc::{AgcParams, TgParams};
use crate::blocks::seconds_to_steps;
use crate::error::{Error, Result};
use crate::ess::{EssParams, PRESET_BESS, PRESET_FESS};
use crate::system::SystemParams;

use super::traces::InputSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasConfig {
    /// Balancing-area bias, MW/0.1 Hz.
    pub b_ba: f64,
    /// Interconnection bias, MW/0.1 Hz.
    pub b_ei: f64,
}

impl Default for BiasConfig {
    fn default() -> Self {
        Self {
            b_ba: -248.2,
            b_ei: -2760.0,
        }
    }
}

impl BiasConfig {
    pub fn constants(&self) -> Result<BiasConstants> {
        BiasConstants::from_per_tenth_hz(self.b_ba, self.b_ei)
    }
}

/// Control-center legs, seconds. The fleet leg `cd_tg` lives in [`TgParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Delays {
    pub measurement_to_cc: f64,
    pub sr_to_tg: f64,
}

impl Default for Delays {
    fn default() -> Self {
        Self {
            measurement_to_cc: 4.0,
            sr_to_tg: 4.0,
        }
    }
}

fn default_delay() -> f64 {
    4.0
}

fn default_soc() -> f64 {
    0.5
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacilityConfig {
    pub name: String,
    /// Set-point leg, control center → facility, seconds.
    #[serde(default = "default_delay")]
    pub sp_to_ess: f64,
    /// Measurement leg, facility → control center, seconds.
    #[serde(default = "default_delay")]
    pub ess_meas_to_cc: f64,
    #[serde(default = "default_soc")]
    pub initial_soc: f64,
    #[serde(default = "default_true")]
    pub soc_model: bool,
    #[serde(flatten)]
    pub params: EssParams,
}

impl FacilityConfig {
    pub fn from_preset(name: impl Into<String>, preset: &str) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            sp_to_ess: default_delay(),
            ess_meas_to_cc: default_delay(),
            initial_soc: default_soc(),
            soc_model: true,
            params: preset_params(preset)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopConfig {
    pub duration: usize,
    pub seed: u64,
    pub biases: BiasConfig,
    pub agc: AgcParams,
    pub tg: TgParams,
    pub system: SystemParams,
    pub delays: Delays,
    #[serde(default, rename = "facility")]
    pub facilities: Vec<FacilityConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_ip_weights: Option<PathBuf>,
    pub inputs: InputSpec,
}

impl Default for LoopConfig {
    fn default() -> Self {
        Self {
            duration: 86_400,
            seed: 0,
            biases: BiasConfig::default(),
            agc: AgcParams::default(),
            tg: TgParams::default(),
            system: SystemParams::default(),
            delays: Delays::default(),
            facilities: Vec::new(),
            f_ip_weights: None,
            inputs: InputSpec::default(),
        }
    }
}

/// Step counts after quantizing every delay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantizedDelays {
    pub measurement_to_cc: usize,
    pub sr_to_tg: usize,
    pub cd_tg: usize,
    /// `(sp_to_ess, ess_meas_to_cc)` per facility.
    pub facilities: Vec<(usize, usize)>,
}

const TOP_KEYS: &[&str] = &[
    "duration",
    "seed",
    "biases",
    "agc",
    "tg",
    "system",
    "delays",
    "facility",
    "f_ip_weights",
    "inputs",
];

impl LoopConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with_overrides(text, &[])
    }

    /// Parses `text`, applies `key=value` overrides, expands presets and validates.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut root: Value = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut root, o)?;
        }
        let config = resolve(root)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>, overrides: &[String]) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_with_overrides(&text, overrides)?;
        // relative paths inside the file are relative to the file
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(w) = &config.f_ip_weights {
            if w.is_relative() {
                config.f_ip_weights = Some(base.join(w));
            }
        }
        config.inputs.rebase(base);
        Ok(config)
    }

    /// Fully explicit TOML; parses back to an equal config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn bias(&self) -> Result<BiasConstants> {
        self.biases.constants()
    }

    pub fn validate(&self) -> Result<()> {
        if self.duration < 1 {
            return Err(Error::config("duration must be at least 1 step"));
        }
        self.bias()?;
        self.agc.validate()?;
        self.tg.validate()?;
        self.system.validate()?;
        let mut delays = vec![
            ("delays.measurement_to_cc", self.delays.measurement_to_cc),
            ("delays.sr_to_tg", self.delays.sr_to_tg),
        ];
        let mut names = BTreeSet::new();
        for f in &self.facilities {
            if !names.insert(f.name.as_str()) {
                return Err(Error::config(format!("duplicate facility name `{}`", f.name)));
            }
            if f.name.is_empty() || f.name.contains(['.', ',']) {
                return Err(Error::config(format!(
                    "facility name `{}` must be non-empty without `.` or `,`",
                    f.name
                )));
            }
            f.params
                .validate()
                .map_err(|e| Error::config(format!("facility `{}`: {e}", f.name)))?;
            if !(0.0..=1.0).contains(&f.initial_soc) {
                return Err(Error::config(format!(
                    "facility `{}`: initial_soc must lie in [0, 1]",
                    f.name
                )));
            }
            delays.push(("sp_to_ess", f.sp_to_ess));
            delays.push(("ess_meas_to_cc", f.ess_meas_to_cc));
        }
        for (name, d) in delays {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::config(format!("{name} must be a finite delay ≥ 0 s, got {d}")));
            }
        }
        self.inputs.validate()?;
        Ok(())
    }

    /// Multiplies every delay, including the fleet leg, by `factor`.
    pub fn scale_delays(&mut self, factor: f64) -> Result<()> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::config(format!(
                "delay factor must be finite and ≥ 0, got {factor}"
            )));
        }
        self.delays.measurement_to_cc *= factor;
        self.delays.sr_to_tg *= factor;
        self.tg.cd_tg *= factor;
        for f in &mut self.facilities {
            f.sp_to_ess *= factor;
            f.ess_meas_to_cc *= factor;
        }
        Ok(())
    }

    pub fn quantized_delays(&self) -> QuantizedDelays {
        QuantizedDelays {
            measurement_to_cc: seconds_to_steps(self.delays.measurement_to_cc),
            sr_to_tg: seconds_to_steps(self.delays.sr_to_tg),
            cd_tg: seconds_to_steps(self.tg.cd_tg),
            facilities: self
                .facilities
                .iter()
                .map(|f| (seconds_to_steps(f.sp_to_ess), seconds_to_steps(f.ess_meas_to_cc)))
                .collect(),
        }
    }
}

fn resolve(mut root: Value) -> Result<LoopConfig> {
    let table = root
        .as_table_mut()
        .ok_or_else(|| Error::config("top level must be a table"))?;
    if let Some(key) = table.keys().find(|k| !TOP_KEYS.contains(&k.as_str())) {
        return Err(Error::config(format!("unknown key `{key}`")));
    }
    let defaults = Value::try_from(LoopConfig::default()).expect("defaults serialize");
    let defaults = defaults.as_table().expect("table");
    for (key, value) in defaults {
        match table.get_mut(key) {
            None => {
                table.insert(key.clone(), value.clone());
            }
            Some(Value::Table(section)) if key != "inputs" => {
                for (k, v) in value.as_table().into_iter().flatten() {
                    section.entry(k.clone()).or_insert_with(|| v.clone());
                }
            }
            Some(_) => {}
        }
    }
    if let Some(Value::Array(facilities)) = table.get_mut("facility") {
        for (i, f) in facilities.iter_mut().enumerate() {
            expand_preset(f, i)?;
        }
    }
    root.try_into::<LoopConfig>()
        .map_err(|e| Error::config(e.to_string()))
}

fn preset_params(name: &str) -> Result<EssParams> {
    EssParams::preset(name).ok_or_else(|| {
        Error::config(format!(
            "unknown preset `{name}` (expected `{PRESET_FESS}` or `{PRESET_BESS}`)"
        ))
    })
}

fn expand_preset(facility: &mut Value, index: usize) -> Result<()> {
    let table = facility
        .as_table_mut()
        .ok_or_else(|| Error::config(format!("facility {index} must be a table")))?;
    let known = Value::try_from(EssParams::bess_table1()).expect("params serialize");
    let known = known.as_table().expect("table");
    let allowed = |k: &str| {
        known.contains_key(k)
            || matches!(
                k,
                "cf_eq" | "preset" | "name" | "sp_to_ess" | "ess_meas_to_cc" | "initial_soc" | "soc_model"
            )
    };
    if let Some(key) = table.keys().find(|k| !allowed(k)) {
        return Err(Error::config(format!("facility {index}: unknown key `{key}`")));
    }
    let Some(preset) = table.remove("preset") else {
        return Ok(());
    };
    let preset = preset
        .as_str()
        .ok_or_else(|| Error::config(format!("facility {index}: preset must be a string")))?;
    let mut params = preset_params(preset)?;
    // an explicit rating carries the preset's slew per MW along with it
    if let Some(pc) = table.get("pc").and_then(|v| v.as_float().or(v.as_integer().map(|i| i as f64))) {
        if pc > 0.0 {
            params = params.resized(pc, params.e_cap);
        }
    }
    let base = Value::try_from(params).expect("preset serializes");
    for (k, v) in base.as_table().expect("table") {
        table.entry(k.clone()).or_insert_with(|| v.clone());
    }
    Ok(())
}

/// `a.b.c=value`. Facility entries are addressed by index or by name:
/// `facility.0.pc=15` or `facility.fess.pc=15`. The value is read as a TOML
/// literal and falls back to a bare string.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::config(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(format!("override key `{key}` is malformed")));
    }
    let mut node = root;
    for (depth, part) in parts.iter().enumerate() {
        let last = depth + 1 == parts.len();
        node = match node {
            Value::Table(t) => {
                if last {
                    t.insert(part.to_string(), value);
                    return Ok(());
                }
                t.entry(part.to_string())
                    .or_insert_with(|| Value::Table(Default::default()))
            }
            Value::Array(items) => {
                let idx = match part.parse::<usize>() {
                    Ok(i) => i,
                    Err(_) => items
                        .iter()
                        .position(|it| it.get("name").and_then(Value::as_str) == Some(*part))
                        .ok_or_else(|| {
                            Error::config(format!("override `{key}`: no entry named `{part}`"))
                        })?,
                };
                let len = items.len();
                let item = items.get_mut(idx).ok_or_else(|| {
                    Error::config(format!("override `{key}`: index {idx} out of range ({len})"))
                })?;
                if last {
                    *item = value;
                    return Ok(());
                }
                item
            }
            _ => {
                return Err(Error::config(format!(
                    "override `{key}`: `{}` is not a section",
                    parts[..depth].join(".")
                )))
            }
        };
    }
    unreachable!("loop returns on the last key part")
}
