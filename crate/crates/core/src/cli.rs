//! `frsim` command line. Every verb validates its inputs first; exit code 0
//! on success, 1 on invalid input, 2 when a run aborts.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::estimation::FitSpec;
use crate::metrics::{histogram, write_histogram, Metrics};
use crate::scenario::{
    read_trace_columns, save_result, simulate, sweep_delays, sweep_ess, CapacitySpec, LoopConfig,
};

#[derive(Debug, Parser)]
#[command(name = "frsim", version, about = "Frequency-regulation loop simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SocMode {
    On,
    Off,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write result.csv, metrics.json, config.toml, events.csv.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Dotted-key override, e.g. `delays.sr_to_tg=0`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// One run per delay factor; writes sweep_delays.csv.
    SweepDelays {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1.0,0.5,0.0", allow_hyphen_values = true)]
        factors: Vec<f64>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// One run per capacity spec and SoC mode; writes sweep_ess.csv.
    SweepEss {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// `name:pc/e_cap[,name:pc/e_cap…]`, repeatable.
        #[arg(long = "spec", required = true, allow_hyphen_values = true)]
        specs: Vec<String>,
        #[arg(long, value_enum, default_value = "both")]
        soc: SocMode,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Estimate parameters against a target trace; writes fit.csv and fit_trace.csv.
    Fit {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// RMSE and MAE of a signal, against zero or a reference column.
    Metrics {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        signal: String,
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Column in the reference file; defaults to `--signal`.
        #[arg(long)]
        reference_signal: Option<String>,
        /// Also write metrics.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Histogram of one column; writes histogram_SIGNAL.csv.
    Histogram {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        signal: String,
        #[arg(long)]
        bin_width: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse, expand presets, validate, and print the resolved configuration.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

/// Parses `args`, runs the verb, prints to stdout/stderr and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn mkdir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn column(path: &Path, name: &str) -> Result<Vec<f64>> {
    read_trace_columns(path)?
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::MissingColumn {
            path: path.display().to_string(),
            column: name.into(),
        })
}

fn resolved_inputs(config: &LoopConfig) -> Result<crate::scenario::InputTraces> {
    config
        .inputs
        .resolve(&config.facilities, config.duration, config.seed, config.agc.rc)
}

/// Runs one verb and returns what it prints on success.
pub fn execute(command: &Command) -> Result<String> {
    let mut out = String::new();
    match command {
        Command::Simulate {
            config,
            out: dir,
            overrides,
        } => {
            let config = LoopConfig::load(config, overrides)?;
            let result = simulate(&config)?;
            save_result(&result, dir)?;
            let m = result.metrics;
            writeln!(out, "ace rmse {:.6} MW, mae {:.6} MW over {} steps", m.rmse, m.mae, m.n)
                .unwrap();
            writeln!(out, "{} events, results in {}", result.events.len(), dir.display()).unwrap();
        }
        Command::SweepDelays {
            config,
            out: dir,
            factors,
            overrides,
        } => {
            if let Some(f) = factors.iter().find(|f| !(f.is_finite() && **f >= 0.0)) {
                return Err(Error::config(format!("delay factor must be ≥ 0, got {f}")));
            }
            let config = LoopConfig::load(config, overrides)?;
            let inputs = resolved_inputs(&config)?;
            let rows = sweep_delays(&config, &inputs, factors)?;
            mkdir(dir)?;
            let mut csv = String::from("factor,measurement_to_cc,sr_to_tg,cd_tg");
            for f in &config.facilities {
                write!(csv, ",sp_to_ess.{0},ess_meas_to_cc.{0}", f.name).unwrap();
            }
            csv.push_str(",rmse,mae\n");
            writeln!(out, "{:>7} {:>22} {:>12} {:>12}", "factor", "steps (meas/sr/tg)", "rmse", "mae")
                .unwrap();
            for r in &rows {
                let d = &r.delays;
                write!(csv, "{},{},{},{}", r.factor, d.measurement_to_cc, d.sr_to_tg, d.cd_tg)
                    .unwrap();
                for (sp, meas) in &d.facilities {
                    write!(csv, ",{sp},{meas}").unwrap();
                }
                writeln!(csv, ",{},{}", r.metrics.rmse, r.metrics.mae).unwrap();
                let steps = format!("{}/{}/{}", d.measurement_to_cc, d.sr_to_tg, d.cd_tg);
                writeln!(
                    out,
                    "{:>7} {:>22} {:>12.4} {:>12.4}",
                    r.factor, steps, r.metrics.rmse, r.metrics.mae
                )
                .unwrap();
            }
            write(&dir.join("sweep_delays.csv"), &csv)?;
        }
        Command::SweepEss {
            config,
            out: dir,
            specs,
            soc,
            overrides,
        } => {
            let specs = specs
                .iter()
                .map(|s| s.parse::<CapacitySpec>())
                .collect::<Result<Vec<_>>>()?;
            let modes: &[bool] = match soc {
                SocMode::On => &[true],
                SocMode::Off => &[false],
                SocMode::Both => &[true, false],
            };
            let config = LoopConfig::load(config, overrides)?;
            let inputs = resolved_inputs(&config)?;
            let rows = sweep_ess(&config, &inputs, &specs, modes)?;
            mkdir(dir)?;
            let mut csv = String::from("spec,soc_model,rmse,mae\n");
            for r in &rows {
                writeln!(csv, "\"{}\",{},{},{}", r.spec, r.soc_model, r.metrics.rmse, r.metrics.mae)
                    .unwrap();
                writeln!(
                    out,
                    "{:<32} soc {:<3} rmse {:>10.4} mae {:>10.4}",
                    r.spec,
                    if r.soc_model { "on" } else { "off" },
                    r.metrics.rmse,
                    r.metrics.mae
                )
                .unwrap();
            }
            write(&dir.join("sweep_ess.csv"), &csv)?;
        }
        Command::Fit {
            spec,
            out: dir,
            overrides,
        } => {
            let problem = FitSpec::load(spec)?.problem(overrides)?;
            let fit = problem.fit()?;
            mkdir(dir)?;
            let mut csv = String::from("parameter,value\n");
            for (name, v) in &fit.parameters {
                writeln!(csv, "{name},{v}").unwrap();
                writeln!(out, "{name} = {v}").unwrap();
            }
            write(&dir.join("fit.csv"), &csv)?;
            let mut trace = String::from("iteration,best_objective\n");
            for (i, v) in fit.trace.iter().enumerate() {
                writeln!(trace, "{i},{v}").unwrap();
            }
            write(&dir.join("fit_trace.csv"), &trace)?;
            writeln!(out, "objective {} after {} evaluations", fit.objective, fit.evaluations)
                .unwrap();
        }
        Command::Metrics {
            input,
            signal,
            reference,
            reference_signal,
            out: dir,
        } => {
            let a = column(input, signal)?;
            let m = match reference {
                Some(path) => {
                    let b = column(path, reference_signal.as_deref().unwrap_or(signal))?;
                    Metrics::between(&a, &b)?
                }
                None => Metrics::of_signal(&a)?,
            };
            if let Some(dir) = dir {
                mkdir(dir)?;
                let json = serde_json::to_string_pretty(&m).expect("metrics serialize");
                write(&dir.join("metrics.json"), &json)?;
            }
            writeln!(out, "signal,rmse,mae,n\n{signal},{},{},{}", m.rmse, m.mae, m.n).unwrap();
        }
        Command::Histogram {
            input,
            signal,
            bin_width,
            out: dir,
        } => {
            let bins = histogram(&column(input, signal)?, *bin_width)?;
            mkdir(dir)?;
            let path = dir.join(format!("histogram_{signal}.csv"));
            write_histogram(&path, &bins)?;
            writeln!(out, "{} bins written to {}", bins.len(), path.display()).unwrap();
        }
        Command::ValidateConfig { config, overrides } => {
            let config = LoopConfig::load(config, overrides)?;
            out.push_str(&config.to_toml());
        }
    }
    Ok(out)
}
