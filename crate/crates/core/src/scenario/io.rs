//! Result directory layout: `result.csv` (step + every signal),
//! `metrics.json`, `config.toml` (fully resolved) and `events.csv`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Metrics;
use crate::series::SampledSeries;

use super::traces::read_columns;
use super::{unit_of, Event, LoopConfig, QuantizedDelays, SimulationResult};

pub const RESULT_FILE: &str = "result.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const EVENTS_FILE: &str = "events.csv";

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    duration: usize,
    seed: u64,
    ace: Metrics,
    delays_steps: QuantizedDelays,
    events: usize,
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes the four result files into `dir`, creating it if needed.
pub fn save_result(result: &SimulationResult, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut csv = String::from("step");
    for (name, _) in &result.signals {
        csv.push(',');
        csv.push_str(name);
    }
    csv.push('\n');
    for t in 0..result.len() {
        write!(csv, "{t}").expect("string write");
        for (_, s) in &result.signals {
            // shortest representation that parses back to the same f64
            write!(csv, ",{}", s.values()[t]).expect("string write");
        }
        csv.push('\n');
    }
    write(&dir.join(RESULT_FILE), &csv)?;

    let sidecar = Sidecar {
        duration: result.config.duration,
        seed: result.config.seed,
        ace: result.metrics,
        delays_steps: result.delays.clone(),
        events: result.events.len(),
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    write(&dir.join(METRICS_FILE), &json)?;
    write(&dir.join(CONFIG_FILE), &result.config.to_toml())?;

    let mut events = String::from("step,source,event,value\n");
    for e in &result.events {
        writeln!(events, "{},{},{},{}", e.step, e.source, e.event, e.value).expect("string write");
    }
    write(&dir.join(EVENTS_FILE), &events)
}

/// Reads a directory written by [`save_result`].
pub fn load_result(dir: impl AsRef<Path>) -> Result<SimulationResult> {
    let dir = dir.as_ref();
    let config_path = dir.join(CONFIG_FILE);
    let text = std::fs::read_to_string(&config_path).map_err(|e| Error::io(&config_path, e))?;
    let config = LoopConfig::from_toml_str(&text)?;

    let signals: Vec<(String, SampledSeries)> = read_columns(&dir.join(RESULT_FILE))?
        .into_iter()
        .map(|(name, values)| {
            let unit = unit_of(&name);
            SampledSeries::new(values, unit).map(|s| (name, s))
        })
        .collect::<Result<_>>()?;
    if let Some((_, s)) = signals.iter().find(|(_, s)| s.len() != config.duration) {
        return Err(Error::LengthMismatch {
            left: s.len(),
            right: config.duration,
        });
    }
    let ace = signals
        .iter()
        .find(|(n, _)| n == "ace")
        .ok_or_else(|| Error::MissingColumn {
            path: dir.join(RESULT_FILE).display().to_string(),
            column: "ace".into(),
        })?;
    let metrics = Metrics::of_signal(ace.1.values())?;

    let events_path = dir.join(EVENTS_FILE);
    let mut reader = csv::Reader::from_path(&events_path).map_err(|e| Error::Parse {
        path: events_path.display().to_string(),
        line: 0,
        msg: e.to_string(),
    })?;
    let events = reader
        .deserialize::<Event>()
        .map(|r| {
            r.map_err(|e| Error::Parse {
                path: events_path.display().to_string(),
                line: e.position().map_or(0, |p| p.line()),
                msg: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SimulationResult {
        delays: config.quantized_delays(),
        config,
        signals,
        metrics,
        events,
    })
}
