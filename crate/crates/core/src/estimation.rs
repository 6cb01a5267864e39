//! Derivative-free parameter estimation: bounded Nelder–Mead over scenario
//! parameters, scored by RMSE against a target trace.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use toml::Value;

use crate::error::{Error, Result};
use crate::metrics::Metrics;
use crate::scenario::{apply_override, run, InputTraces, LoopConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NelderMeadSettings {
    /// Objective evaluations across all restarts.
    pub max_evals: usize,
    /// Stop once the simplex values spread less than this.
    pub tol: f64,
    /// Fresh simplices built around the best point after the first search.
    pub restarts: usize,
    /// Initial simplex edge as a fraction of each parameter's range.
    pub initial_step: f64,
}

impl Default for NelderMeadSettings {
    fn default() -> Self {
        Self {
            max_evals: 400,
            tol: 1e-10,
            restarts: 2,
            initial_step: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Best value after each iteration; never increases.
    pub trace: Vec<f64>,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
/// Objective penalty per unit of coordinate clipping, relative to the range.
const PENALTY: f64 = 1e6;

struct Bounded<'a, F> {
    f: &'a F,
    bounds: &'a [(f64, f64)],
    evals: usize,
    best: (Vec<f64>, f64),
}

impl<F: Fn(&[f64]) -> f64 + Sync> Bounded<'_, F> {
    fn clip(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let mut excess = 0.0;
        let clipped = x
            .iter()
            .zip(self.bounds)
            .map(|(&v, &(lo, hi))| {
                let c = v.clamp(lo, hi);
                excess += (v - c).abs() / (hi - lo).max(f64::MIN_POSITIVE);
                c
            })
            .collect();
        (clipped, excess)
    }

    /// Penalized values for a batch of points, evaluated in parallel.
    fn eval_many(&mut self, points: &[Vec<f64>]) -> Vec<f64> {
        let clipped: Vec<(Vec<f64>, f64)> = points.iter().map(|p| self.clip(p)).collect();
        let raw: Vec<f64> = clipped
            .par_iter()
            .map(|(c, _)| {
                let v = (self.f)(c);
                if v.is_nan() {
                    f64::INFINITY
                } else {
                    v
                }
            })
            .collect();
        self.evals += points.len();
        for ((c, _), &v) in clipped.iter().zip(&raw) {
            if v < self.best.1 {
                self.best = (c.clone(), v);
            }
        }
        raw.iter()
            .zip(&clipped)
            .map(|(&v, (_, excess))| v + PENALTY * excess * (1.0 + v.abs().min(1e300)))
            .collect()
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        self.eval_many(&[x.to_vec()])[0]
    }
}

/// Minimizes `f` inside `bounds`, starting from `start` (or the box midpoint).
pub fn nelder_mead<F>(
    f: &F,
    bounds: &[(f64, f64)],
    start: Option<&[f64]>,
    settings: &NelderMeadSettings,
) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = bounds.len();
    if n == 0 {
        return Err(Error::Optimizer("no free parameters".into()));
    }
    if let Some((i, _)) = bounds
        .iter()
        .enumerate()
        .find(|(_, (lo, hi))| !(lo.is_finite() && hi.is_finite() && lo <= hi))
    {
        return Err(Error::Optimizer(format!("bounds of parameter {i} are not ordered")));
    }
    let mut state = Bounded {
        f,
        bounds,
        evals: 0,
        best: (Vec::new(), f64::INFINITY),
    };
    let mut center: Vec<f64> = match start {
        Some(s) if s.len() == n => s.to_vec(),
        Some(s) => {
            return Err(Error::Optimizer(format!(
                "start has {} coordinates, expected {n}",
                s.len()
            )))
        }
        None => bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect(),
    };
    let mut trace = Vec::new();

    for round in 0..=settings.restarts {
        if state.evals >= settings.max_evals {
            break;
        }
        let mut simplex = vec![center.clone()];
        for i in 0..n {
            let (lo, hi) = bounds[i];
            let mut v = center.clone();
            let step = settings.initial_step * (hi - lo);
            // step inwards so the first simplex stays feasible
            v[i] += if v[i] + step <= hi { step } else { -step };
            simplex.push(v);
        }
        let mut values = state.eval_many(&simplex);
        if round == 0 && values.iter().all(|v| !v.is_finite()) {
            return Err(Error::Optimizer(format!(
                "objective is not finite at any initial vertex: {simplex:?}"
            )));
        }
        trace.push(state.best.1);

        while state.evals < settings.max_evals {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();
            let spread = values[n] - values[0];
            if spread.abs() <= settings.tol || !values[0].is_finite() && !values[n].is_finite() {
                break;
            }
            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(REFLECT);
            let fr = state.eval(&xr);
            if fr < values[0] {
                let xe = along(REFLECT * EXPAND);
                let fe = state.eval(&xe);
                if fe < fr {
                    simplex[n] = xe;
                    values[n] = fe;
                } else {
                    simplex[n] = xr;
                    values[n] = fr;
                }
            } else if fr < values[n - 1] {
                simplex[n] = xr;
                values[n] = fr;
            } else {
                let (xc, fc) = if fr < values[n] {
                    let xc = along(REFLECT * CONTRACT);
                    let fc = state.eval(&xc);
                    (xc, fc)
                } else {
                    let xc = along(-CONTRACT);
                    let fc = state.eval(&xc);
                    (xc, fc)
                };
                if fc < values[n].min(fr) {
                    simplex[n] = xc;
                    values[n] = fc;
                } else {
                    let best = simplex[0].clone();
                    let shrunk: Vec<Vec<f64>> = simplex[1..]
                        .iter()
                        .map(|v| best.iter().zip(v).map(|(b, x)| b + SHRINK * (x - b)).collect())
                        .collect();
                    let shrunk_values = state.eval_many(&shrunk);
                    for (i, (v, f)) in shrunk.into_iter().zip(shrunk_values).enumerate() {
                        simplex[i + 1] = v;
                        values[i + 1] = f;
                    }
                }
            }
            trace.push(state.best.1);
        }
        center = state.best.0.clone();
    }

    let (x, value) = state.best;
    if !value.is_finite() {
        return Err(Error::Optimizer("no finite objective value found".into()));
    }
    Ok(Minimum {
        x,
        value,
        evaluations: state.evals,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitParameter {
    /// Dotted config key, e.g. `agc.kp` or `tg.den.1`.
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// Fit specification file.
///
/// ```toml
/// scenario = "day.toml"
/// target = "target.csv"
/// signal = "sr"
///
/// [optimizer]
/// max_evals = 400
///
/// [[parameter]]
/// name = "agc.kp"
/// lower = 0.1
/// upper = 1.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub scenario: PathBuf,
    pub target: PathBuf,
    pub signal: String,
    #[serde(default)]
    pub optimizer: NelderMeadSettings,
    #[serde(rename = "parameter")]
    pub parameters: Vec<FitParameter>,
}

impl FitSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec: Self = toml::from_str(&text).map_err(|e| Error::config(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut spec.scenario, &mut spec.target] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(spec)
    }

    /// Reads the scenario and the target column, ready to fit.
    pub fn problem(&self, overrides: &[String]) -> Result<FitProblem> {
        let config = LoopConfig::load(&self.scenario, overrides)?;
        let columns = crate::scenario::read_trace_columns(&self.target)?;
        let target = match columns.iter().find(|(n, _)| *n == self.signal) {
            Some((_, v)) => v.clone(),
            None if columns.len() == 1 => columns[0].1.clone(),
            None => {
                return Err(Error::MissingColumn {
                    path: self.target.display().to_string(),
                    column: self.signal.clone(),
                })
            }
        };
        FitProblem::new(
            config,
            self.signal.clone(),
            target,
            self.parameters.clone(),
            self.optimizer,
        )
    }
}

#[derive(Debug, Clone)]
pub struct FitProblem {
    base: Value,
    config: LoopConfig,
    inputs: InputTraces,
    signal: String,
    target: Vec<f64>,
    parameters: Vec<FitParameter>,
    settings: NelderMeadSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub parameters: Vec<(String, f64)>,
    pub objective: f64,
    pub evaluations: usize,
    pub trace: Vec<f64>,
}

impl FitProblem {
    pub fn new(
        config: LoopConfig,
        signal: String,
        target: Vec<f64>,
        parameters: Vec<FitParameter>,
        settings: NelderMeadSettings,
    ) -> Result<Self> {
        if parameters.is_empty() {
            return Err(Error::config("a fit needs at least one free parameter"));
        }
        for p in &parameters {
            if !(p.lower.is_finite() && p.upper.is_finite() && p.lower <= p.upper) {
                return Err(Error::config(format!("parameter `{}`: bounds not ordered", p.name)));
            }
            let root = p.name.split('.').next().unwrap_or("");
            if matches!(root, "inputs" | "duration" | "seed") {
                return Err(Error::config(format!(
                    "parameter `{}` would change the inputs; not fittable",
                    p.name
                )));
            }
        }
        if target.len() != config.duration {
            return Err(Error::LengthMismatch {
                left: target.len(),
                right: config.duration,
            });
        }
        let inputs = config.inputs.resolve(
            &config.facilities,
            config.duration,
            config.seed,
            config.agc.rc,
        )?;
        let base = Value::try_from(&config).map_err(|e| Error::config(e.to_string()))?;
        let problem = Self {
            base,
            config,
            inputs,
            signal,
            target,
            parameters,
            settings,
        };
        // fail early on unknown keys or signals
        let mid: Vec<f64> = problem
            .parameters
            .iter()
            .map(|p| 0.5 * (p.lower + p.upper))
            .collect();
        let c = problem.configure(&mid)?;
        let r = run(&c, &problem.inputs)?;
        if r.signal(&problem.signal).is_none() {
            return Err(Error::config(format!("no signal named `{}`", problem.signal)));
        }
        Ok(problem)
    }

    pub fn config(&self) -> &LoopConfig {
        &self.config
    }

    /// The base configuration with `values` written into the free parameters.
    pub fn configure(&self, values: &[f64]) -> Result<LoopConfig> {
        let mut root = self.base.clone();
        for (p, v) in self.parameters.iter().zip(values) {
            apply_override(&mut root, &format!("{}={v:?}", p.name))?;
        }
        let c: LoopConfig = root
            .try_into()
            .map_err(|e: toml::de::Error| Error::config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// RMSE of the chosen signal against the target; infinite where the
    /// configuration is rejected (e.g. an unstable transfer function) or the
    /// run diverges.
    pub fn objective(&self, values: &[f64]) -> f64 {
        let Ok(c) = self.configure(values) else {
            return f64::INFINITY;
        };
        match run(&c, &self.inputs) {
            Ok(r) => r
                .signal(&self.signal)
                .and_then(|s| Metrics::between(s.values(), &self.target).ok())
                .map_or(f64::INFINITY, |m| m.rmse),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn fit(&self) -> Result<FitResult> {
        let bounds: Vec<(f64, f64)> = self.parameters.iter().map(|p| (p.lower, p.upper)).collect();
        let m = nelder_mead(&|x: &[f64]| self.objective(x), &bounds, None, &self.settings)?;
        Ok(FitResult {
            parameters: self
                .parameters
                .iter()
                .map(|p| p.name.clone())
                .zip(m.x)
                .collect(),
            objective: m.value,
            evaluations: m.evaluations,
            trace: m.trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.7).powi(2);
        let m = nelder_mead(&f, &[(-2.0, 2.0), (-2.0, 2.0)], None, &Default::default()).unwrap();
        assert!((m.x[0] - 0.3).abs() < 1e-4 && (m.x[1] + 0.7).abs() < 1e-4, "{:?}", m.x);
    }

    #[test]
    fn rosenbrock_with_restarts() {
        let settings = NelderMeadSettings {
            max_evals: 3000,
            tol: 1e-14,
            ..Default::default()
        };
        let m = nelder_mead(&rosenbrock, &[(-2.0, 2.0), (-1.0, 3.0)], None, &settings).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-3 && (m.x[1] - 1.0).abs() < 1e-3, "{:?}", m.x);
        assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(m.evaluations <= 3000 + 2);
    }

    #[test]
    fn optimum_outside_box_returns_bound() {
        let f = |x: &[f64]| (x[0] - 5.0).powi(2);
        let m = nelder_mead(&f, &[(0.0, 1.0)], None, &Default::default()).unwrap();
        assert_eq!(m.x[0], 1.0);
    }

    #[test]
    fn all_infinite_initial_vertices() {
        let f = |_: &[f64]| f64::NAN;
        let err = nelder_mead(&f, &[(0.0, 1.0)], None, &Default::default()).unwrap_err();
        assert!(matches!(err, Error::Optimizer(_)));
    }

    #[test]
    fn rejects_empty_and_unordered() {
        let f = |_: &[f64]| 0.0;
        assert!(nelder_mead(&f, &[], None, &Default::default()).is_err());
        assert!(nelder_mead(&f, &[(1.0, 0.0)], None, &Default::default()).is_err());
    }

    #[test]
    fn deterministic() {
        let a = nelder_mead(&rosenbrock, &[(-2.0, 2.0), (-1.0, 3.0)], None, &Default::default())
            .unwrap();
        let b = nelder_mead(&rosenbrock, &[(-2.0, 2.0), (-1.0, 3.0)], None, &Default::default())
            .unwrap();
        assert_eq!(a, b);
    }
}
