//! Error metrics and histograms.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::SampledSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse: f64,
    pub mae: f64,
    pub n: usize,
}

impl Metrics {
    /// Errors of `a` against `b`, sample by sample.
    pub fn between(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        Self::of_errors(a.iter().zip(b).map(|(x, y)| x - y))
    }

    /// Errors of `a` against zero.
    pub fn of_signal(a: &[f64]) -> Result<Self> {
        Self::of_errors(a.iter().copied())
    }

    fn of_errors(errors: impl Iterator<Item = f64>) -> Result<Self> {
        let (mut sq, mut abs, mut n) = (0.0, 0.0, 0usize);
        for e in errors {
            sq += e * e;
            abs += e.abs();
            n += 1;
        }
        if n == 0 {
            return Err(Error::config("metrics need at least one sample"));
        }
        let rmse = (sq / n as f64).sqrt();
        let mae = abs / n as f64;
        // power-mean inequality, up to rounding
        assert!(
            rmse >= mae * (1.0 - 1e-12) || !rmse.is_finite(),
            "rmse {rmse} < mae {mae}"
        );
        Ok(Self { rmse, mae, n })
    }
}

pub fn compute_metrics(a: &SampledSeries, b: &SampledSeries) -> Result<Metrics> {
    Metrics::between(a.values(), b.values())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

/// Left-closed bins of width `bin_width` starting at the minimum; the last
/// bin also holds the maximum.
pub fn histogram(values: &[f64], bin_width: f64) -> Result<Vec<Bin>> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(Error::config(format!("bin width must be > 0, got {bin_width}")));
    }
    if values.is_empty() {
        return Err(Error::config("histogram of an empty series"));
    }
    let (min, max) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if !(min.is_finite() && max.is_finite()) {
        return Err(Error::config("histogram input must be finite"));
    }
    let count = (((max - min) / bin_width).floor() as usize + 1).max(1);
    let mut bins: Vec<Bin> = (0..count)
        .map(|i| Bin {
            left: min + i as f64 * bin_width,
            right: min + (i + 1) as f64 * bin_width,
            count: 0,
        })
        .collect();
    for &v in values {
        let i = (((v - min) / bin_width).floor() as usize).min(count - 1);
        bins[i].count += 1;
    }
    Ok(bins)
}

/// CSV with columns `bin_left,bin_right,count`.
pub fn histogram_csv(bins: &[Bin]) -> String {
    let mut out = String::from("bin_left,bin_right,count\n");
    for b in bins {
        out.push_str(&format!("{},{},{}\n", b.left, b.right, b.count));
    }
    out
}

pub fn write_histogram(path: impl AsRef<Path>, bins: &[Bin]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, histogram_csv(bins)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_series() {
        let m = Metrics::between(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!((m.rmse, m.mae, m.n), (0.0, 0.0, 2));
    }

    #[test]
    fn two_sample_example() {
        let m = Metrics::between(&[3.0, -4.0], &[0.0, 0.0]).unwrap();
        assert!((m.rmse - 12.5f64.sqrt()).abs() < 1e-15);
        assert!((m.rmse - 3.5355).abs() < 1e-4);
        assert_eq!(m.mae, 3.5);
    }

    #[test]
    fn constant_error() {
        let m = Metrics::of_signal(&[-2.5; 7]).unwrap();
        assert_eq!((m.rmse, m.mae), (2.5, 2.5));
    }

    #[test]
    fn length_and_empty_errors() {
        assert!(Metrics::between(&[1.0], &[1.0, 2.0]).is_err());
        assert!(Metrics::of_signal(&[]).is_err());
    }

    #[test]
    fn histogram_examples() {
        let bins = histogram(&[0.0, 0.5, 1.5], 1.0).unwrap();
        assert_eq!(bins.len(), 2);
        assert_eq!((bins[0].left, bins[0].right, bins[0].count), (0.0, 1.0, 2));
        assert_eq!((bins[1].left, bins[1].right, bins[1].count), (1.0, 2.0, 1));

        let bins = histogram(&[4.0; 9], 0.5).unwrap();
        assert_eq!(bins.len(), 1);
        assert_eq!(bins[0].count, 9);

        assert!(histogram(&[], 1.0).is_err());
        assert!(histogram(&[1.0], 0.0).is_err());
    }

    #[test]
    fn csv_layout() {
        let text = histogram_csv(&histogram(&[0.0, 0.5, 1.5], 1.0).unwrap());
        assert_eq!(text, "bin_left,bin_right,count\n0,1,2\n1,2,1\n");
    }
}
