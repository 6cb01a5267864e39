use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling interval shared by every block, in seconds.
pub const DT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Mw,
    Hz,
    Fraction,
    Dimensionless,
}

/// Uniformly sampled scalar signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSeries {
    values: Vec<f64>,
    dt: f64,
    unit: Unit,
}

impl SampledSeries {
    /// Builds a series at the loop's 1 s resolution. Every sample must be finite.
    pub fn new(values: Vec<f64>, unit: Unit) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                block: format!("series sample {i}"),
                value: *v,
            });
        }
        Ok(Self {
            values,
            dt: DT,
            unit,
        })
    }

    pub fn constant(value: f64, len: usize, unit: Unit) -> Result<Self> {
        Self::new(vec![value; len], unit)
    }

    pub(crate) fn from_trusted(values: Vec<f64>, unit: Unit) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self {
            values,
            dt: DT,
            unit,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, t: usize) -> Option<f64> {
        self.values.get(t).copied()
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_samples() {
        assert!(SampledSeries::new(vec![1.0, f64::NAN], Unit::Mw).is_err());
        assert!(SampledSeries::new(vec![f64::INFINITY], Unit::Hz).is_err());
    }

    #[test]
    fn fixed_resolution() {
        let s = SampledSeries::constant(2.0, 3, Unit::Mw).unwrap();
        assert_eq!(s.dt(), 1.0);
        assert_eq!(s.len(), 3);
        assert_eq!(s.mean(), 2.0);
        assert_eq!(s.unit(), Unit::Mw);
    }
}
