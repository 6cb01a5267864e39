//! Input signals of a run: load and dispatch, schedules, payback, manual
//! error, regulation capacity and facility availability.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{SampledSeries, Unit};

use super::config::FacilityConfig;

/// Linear ramp added on top of the stochastic load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ramp {
    pub start: usize,
    /// Steps to reach the full `delta`; 0 makes it a step change.
    pub duration: usize,
    pub delta: f64,
}

impl Ramp {
    fn offset(&self, t: usize) -> f64 {
        if t < self.start {
            0.0
        } else if self.duration == 0 || t >= self.start + self.duration {
            self.delta
        } else {
            self.delta * (t - self.start) as f64 / self.duration as f64
        }
    }
}

/// Mean-reverting random walk: `x ← x + r·(mean − x) + N(0, σ²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoadSpec {
    pub mean: f64,
    pub sigma: f64,
    pub reversion: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ramps: Vec<Ramp>,
}

impl Default for LoadSpec {
    fn default() -> Self {
        Self {
            mean: 15_000.0,
            sigma: 0.0,
            reversion: 0.01,
            ramps: Vec::new(),
        }
    }
}

impl LoadSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::config(format!("load sigma must be ≥ 0, got {}", self.sigma)));
        }
        if !(0.0..=1.0).contains(&self.reversion) {
            return Err(Error::config(format!(
                "load reversion must lie in [0, 1], got {}",
                self.reversion
            )));
        }
        if !self.mean.is_finite() || self.ramps.iter().any(|r| !r.delta.is_finite()) {
            return Err(Error::config("load mean and ramp deltas must be finite"));
        }
        Ok(())
    }
}

/// Reproducible synthetic load.
pub fn synthesize_load(spec: &LoadSpec, duration: usize, seed: u64) -> Result<SampledSeries> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spec.sigma).map_err(|e| Error::config(e.to_string()))?;
    let mut x = spec.mean;
    let mut out = Vec::with_capacity(duration);
    for t in 0..duration {
        let ramp: f64 = spec.ramps.iter().map(|r| r.offset(t)).sum();
        out.push(x + ramp);
        let draw = if spec.sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
        x += spec.reversion * (spec.mean - x) + draw;
    }
    SampledSeries::new(out, Unit::Mw)
}

/// Scheduled generation holds the load seen at the start of each dispatch
/// interval. `interval = 0` holds the first sample for the whole run.
pub fn dispatch(pd: &SampledSeries, interval: usize) -> SampledSeries {
    let v = pd.values();
    let out = (0..v.len())
        .map(|t| if interval == 0 { v[0] } else { v[t - t % interval] })
        .collect();
    SampledSeries::new(out, Unit::Mw).expect("load samples are finite")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    /// CSV with at least `pd` and `pgt`; other columns override the
    /// constants below.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    #[serde(default)]
    pub load: LoadSpec,
    /// Dispatch interval for the scheduled generation, steps.
    #[serde(default = "default_dispatch")]
    pub dispatch_interval: usize,
    #[serde(default)]
    pub ni_s: f64,
    #[serde(default = "default_f_s")]
    pub f_s: f64,
    #[serde(default)]
    pub ip: f64,
    #[serde(default = "default_ime")]
    pub ime: f64,
    /// Defaults to `agc.rc`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rc: Option<f64>,
    #[serde(default = "default_av")]
    pub av: f64,
}

fn default_dispatch() -> usize {
    300
}
fn default_f_s() -> f64 {
    60.0
}
fn default_ime() -> f64 {
    -35.0
}
fn default_av() -> f64 {
    1.0
}

impl Default for InputSpec {
    fn default() -> Self {
        Self {
            trace: None,
            load: LoadSpec::default(),
            dispatch_interval: default_dispatch(),
            ni_s: 0.0,
            f_s: default_f_s(),
            ip: 0.0,
            ime: default_ime(),
            rc: None,
            av: default_av(),
        }
    }
}

impl InputSpec {
    pub(crate) fn rebase(&mut self, base: &Path) {
        if let Some(t) = &self.trace {
            if t.is_relative() {
                self.trace = Some(base.join(t));
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.load.validate()?;
        for (name, v) in [
            ("ni_s", self.ni_s),
            ("f_s", self.f_s),
            ("ip", self.ip),
            ("ime", self.ime),
            ("rc", self.rc.unwrap_or(0.0)),
        ] {
            if !v.is_finite() {
                return Err(Error::config(format!("inputs.{name} must be finite")));
            }
        }
        if self.rc.is_some_and(|rc| rc < 0.0) {
            return Err(Error::config("inputs.rc must be ≥ 0"));
        }
        if self.av != 0.0 && self.av != 1.0 {
            return Err(Error::config("inputs.av must be 0 or 1"));
        }
        Ok(())
    }

    /// Builds every trace for a run, reading the trace file if one is set.
    pub fn resolve(
        &self,
        facilities: &[FacilityConfig],
        duration: usize,
        seed: u64,
        rc_default: f64,
    ) -> Result<InputTraces> {
        let names: Vec<&str> = facilities.iter().map(|f| f.name.as_str()).collect();
        let mut traces = match &self.trace {
            Some(path) => load_traces(path, &names, duration)?,
            None => {
                let pd = synthesize_load(&self.load, duration, seed)?;
                let pgt = dispatch(&pd, self.dispatch_interval);
                InputTraces::constant(pd, pgt)?
            }
        };
        traces.fill_defaults(self, rc_default, &names, duration)?;
        Ok(traces)
    }
}

/// Fully materialized inputs, one sample per step.
#[derive(Debug, Clone, PartialEq)]
pub struct InputTraces {
    pub pd: SampledSeries,
    pub pgt: SampledSeries,
    pub ni_s: Option<SampledSeries>,
    pub f_s: Option<SampledSeries>,
    pub ip: Option<SampledSeries>,
    pub ime: Option<SampledSeries>,
    pub rc: Option<SampledSeries>,
    /// Availability per facility name (0 or 1).
    pub av: BTreeMap<String, SampledSeries>,
}

impl InputTraces {
    fn constant(pd: SampledSeries, pgt: SampledSeries) -> Result<Self> {
        if pd.len() != pgt.len() {
            return Err(Error::LengthMismatch {
                left: pd.len(),
                right: pgt.len(),
            });
        }
        Ok(Self {
            pd,
            pgt,
            ni_s: None,
            f_s: None,
            ip: None,
            ime: None,
            rc: None,
            av: BTreeMap::new(),
        })
    }

    /// Equilibrium inputs: flat load met by flat dispatch, all schedules met.
    pub fn equilibrium(
        load: f64,
        duration: usize,
        spec: &InputSpec,
        rc_default: f64,
        names: &[&str],
    ) -> Result<Self> {
        let pd = SampledSeries::constant(load, duration, Unit::Mw)?;
        let mut t = Self::constant(pd.clone(), pd)?;
        t.fill_defaults(spec, rc_default, names, duration)?;
        Ok(t)
    }

    fn fill_defaults(
        &mut self,
        spec: &InputSpec,
        rc_default: f64,
        names: &[&str],
        duration: usize,
    ) -> Result<()> {
        let fill = |slot: &mut Option<SampledSeries>, v: f64, unit: Unit| -> Result<()> {
            if slot.is_none() {
                *slot = Some(SampledSeries::constant(v, duration, unit)?);
            }
            Ok(())
        };
        fill(&mut self.ni_s, spec.ni_s, Unit::Mw)?;
        fill(&mut self.f_s, spec.f_s, Unit::Hz)?;
        fill(&mut self.ip, spec.ip, Unit::Mw)?;
        fill(&mut self.ime, spec.ime, Unit::Mw)?;
        fill(&mut self.rc, spec.rc.unwrap_or(rc_default), Unit::Mw)?;
        for name in names {
            if !self.av.contains_key(*name) {
                self.av.insert(
                    name.to_string(),
                    SampledSeries::constant(spec.av, duration, Unit::Dimensionless)?,
                );
            }
        }
        self.check(duration)
    }

    fn check(&self, duration: usize) -> Result<()> {
        for s in self.all() {
            if s.len() != duration {
                return Err(Error::LengthMismatch {
                    left: s.len(),
                    right: duration,
                });
            }
        }
        if let Some(f) = &self.f_s {
            if let Some(v) = f.values().iter().find(|v| !(55.0..=65.0).contains(*v)) {
                return Err(Error::config(format!("f_s sample {v} Hz is not near 60 Hz")));
            }
        }
        for (name, av) in &self.av {
            if av.values().iter().any(|&v| v != 0.0 && v != 1.0) {
                return Err(Error::config(format!("av.{name} must contain only 0 and 1")));
            }
        }
        Ok(())
    }

    fn all(&self) -> impl Iterator<Item = &SampledSeries> {
        [&self.ni_s, &self.f_s, &self.ip, &self.ime, &self.rc]
            .into_iter()
            .flatten()
            .chain([&self.pd, &self.pgt])
            .chain(self.av.values())
    }

    pub fn len(&self) -> usize {
        self.pd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pd.is_empty()
    }

}

const OPTIONAL: &[(&str, Unit)] = &[
    ("ni_s", Unit::Mw),
    ("f_s", Unit::Hz),
    ("ip", Unit::Mw),
    ("ime", Unit::Mw),
    ("rc", Unit::Mw),
];

/// Reads a trace CSV: header row, `step` first, then named columns.
/// `pd` and `pgt` are required; `ni_s`, `f_s`, `ip`, `ime`, `rc` and
/// `av.<facility>` are optional. Only the first `duration` rows are used.
pub fn load_traces(path: impl AsRef<Path>, facilities: &[&str], duration: usize) -> Result<InputTraces> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let columns = read_columns(path)?;
    let take = |name: &str| -> Option<Vec<f64>> {
        columns.iter().position(|(n, _)| n == name).map(|i| columns[i].1.clone())
    };
    let known = |n: &str| {
        ["pd", "pgt"].contains(&n)
            || OPTIONAL.iter().any(|(o, _)| *o == n)
            || n.strip_prefix("av.").is_some_and(|f| facilities.contains(&f))
    };
    if let Some((bad, _)) = columns.iter().find(|(n, _)| !known(n)) {
        return Err(Error::Parse {
            path: shown,
            line: 1,
            msg: format!("unknown column `{bad}`"),
        });
    }
    let rows = columns.first().map_or(0, |(_, v)| v.len());
    if rows < duration {
        return Err(Error::LengthMismatch {
            left: rows,
            right: duration,
        });
    }
    let series = |values: Vec<f64>, unit| SampledSeries::new(values[..duration].to_vec(), unit);
    let required = |name: &str, col: Option<Vec<f64>>| {
        col.ok_or_else(|| Error::MissingColumn {
            path: shown.clone(),
            column: name.into(),
        })
    };
    let pd = series(required("pd", take("pd"))?, Unit::Mw)?;
    let pgt = series(required("pgt", take("pgt"))?, Unit::Mw)?;
    let mut opt = OPTIONAL
        .iter()
        .map(|(name, unit)| take(name).map(|v| series(v, *unit)).transpose())
        .collect::<Result<Vec<_>>>()?
        .into_iter();
    let mut next = || opt.next().flatten();
    let (ni_s, f_s, ip, ime, rc) = (next(), next(), next(), next(), next());
    let mut av = BTreeMap::new();
    for name in facilities {
        if let Some(v) = take(&format!("av.{name}")) {
            av.insert(name.to_string(), series(v, Unit::Dimensionless)?);
        }
    }
    Ok(InputTraces {
        pd,
        pgt,
        ni_s,
        f_s,
        ip,
        ime,
        rc,
        av,
    })
}

/// Parses a step-indexed CSV into named columns (the `step` column is
/// checked and dropped).
pub(crate) fn read_columns(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(&shown, e))?;
    let headers = reader.headers().map_err(|e| csv_error(&shown, e))?.clone();
    if headers.get(0).map(str::trim) != Some("step") {
        return Err(Error::MissingColumn {
            path: shown,
            column: "step".into(),
        });
    }
    let names: Vec<String> = headers.iter().skip(1).map(|h| h.trim().to_string()).collect();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(&shown, e))?;
        let line = record.position().map_or(row as u64 + 2, |p| p.line());
        let bad = |msg: String| Error::Parse {
            path: shown.clone(),
            line,
            msg,
        };
        if record.len() != names.len() + 1 {
            return Err(bad(format!(
                "expected {} fields, found {}",
                names.len() + 1,
                record.len()
            )));
        }
        let step: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| bad(format!("step `{}` is not an index", &record[0])))?;
        if step != row {
            return Err(bad(format!("expected step {row}, found {step}")));
        }
        for (i, col) in columns.iter_mut().enumerate() {
            let field = record[i + 1].trim();
            let v: f64 = field
                .parse()
                .map_err(|_| bad(format!("`{field}` in column `{}` is not a number", names[i])))?;
            if !v.is_finite() {
                return Err(bad(format!("non-finite value in column `{}`", names[i])));
            }
            col.push(v);
        }
    }
    Ok(names.into_iter().zip(columns).collect())
}

fn csv_error(path: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Parse {
            path: path.into(),
            line,
            msg: format!("{other:?}"),
        },
    }
}
