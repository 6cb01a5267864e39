//! Inference for the f(IP) correction network: 3 inputs, 48 tanh units,
//! one linear output, with min-max scaling to [−1, 1] on both ends.
//!
//! Weight files come in two flavours:
//!
//! * JSON with keys `w1` (48×3), `b1` (48), `w2` (1×48), `b2` (1),
//!   `input_ranges` (3×2) and `output_range` (2);
//! * binary: the 8-byte magic `FRMLP001`, three little-endian `u32` shape
//!   words (hidden, inputs, outputs) and then little-endian `f64` arrays in
//!   the order w1 (row-major), b1, w2, b2, input_ranges, output_range.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HIDDEN: usize = 48;
pub const INPUTS: usize = 3;
pub const MAGIC: &[u8; 8] = b"FRMLP001";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpCorrection {
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<Vec<f64>>,
    pub b2: Vec<f64>,
    pub input_ranges: Vec<[f64; 2]>,
    pub output_range: [f64; 2],
}

fn to_unit(x: f64, [lo, hi]: [f64; 2]) -> f64 {
    2.0 * (x - lo) / (hi - lo) - 1.0
}

fn from_unit(y: f64, [lo, hi]: [f64; 2]) -> f64 {
    (y + 1.0) * (hi - lo) / 2.0 + lo
}

impl MlpCorrection {
    /// A network whose every weight is zero.
    pub fn zeros(input_ranges: [[f64; 2]; INPUTS], output_range: [f64; 2]) -> Self {
        Self {
            w1: vec![vec![0.0; INPUTS]; HIDDEN],
            b1: vec![0.0; HIDDEN],
            w2: vec![vec![0.0; HIDDEN]],
            b2: vec![0.0],
            input_ranges: input_ranges.to_vec(),
            output_range,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let shape_err = |what: &str| Err(Error::Weights(format!("shape mismatch in {what}")));
        if self.w1.len() != HIDDEN || self.w1.iter().any(|r| r.len() != INPUTS) {
            return shape_err("w1 (expected 48×3)");
        }
        if self.b1.len() != HIDDEN {
            return shape_err("b1 (expected 48)");
        }
        if self.w2.len() != 1 || self.w2[0].len() != HIDDEN {
            return shape_err("w2 (expected 1×48)");
        }
        if self.b2.len() != 1 {
            return shape_err("b2 (expected 1)");
        }
        if self.input_ranges.len() != INPUTS {
            return shape_err("input_ranges (expected 3×2)");
        }
        for r in self.input_ranges.iter().chain(std::iter::once(&self.output_range)) {
            if !(r[0] < r[1]) {
                return Err(Error::Weights(format!(
                    "range [{}, {}] must have min < max",
                    r[0], r[1]
                )));
            }
        }
        let finite = self
            .w1
            .iter()
            .flatten()
            .chain(&self.b1)
            .chain(self.w2.iter().flatten())
            .chain(&self.b2)
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Weights("non-finite weight".into()));
        }
        Ok(())
    }

    /// Hidden-layer activations for the raw inputs.
    pub fn hidden(&self, ip_t: f64, ip_lagged: f64) -> Vec<f64> {
        let raw = [ip_t, ip_lagged, ip_t - ip_lagged];
        let x: Vec<f64> = raw
            .iter()
            .zip(&self.input_ranges)
            .map(|(&v, &r)| to_unit(v, r))
            .collect();
        self.w1
            .iter()
            .zip(&self.b1)
            .map(|(row, b)| (row.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>() + b).tanh())
            .collect()
    }

    /// f(IP) in MW for the current and 10-s-old inadvertent payback.
    pub fn f_ip(&self, ip_t: f64, ip_lagged: f64) -> f64 {
        let h = self.hidden(ip_t, ip_lagged);
        let y = self.w2[0].iter().zip(&h).map(|(w, v)| w * v).sum::<f64>() + self.b2[0];
        from_unit(y, self.output_range)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self =
            serde_json::from_str(text).map_err(|e| Error::Weights(format!("json: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("weights serialize")
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 12 + 8 * (HIDDEN * 5 + 9));
        out.extend_from_slice(MAGIC);
        for dim in [HIDDEN as u32, INPUTS as u32, 1u32] {
            out.extend_from_slice(&dim.to_le_bytes());
        }
        let values = self
            .w1
            .iter()
            .flatten()
            .chain(&self.b1)
            .chain(self.w2.iter().flatten())
            .chain(&self.b2)
            .chain(self.input_ranges.iter().flatten())
            .chain(&self.output_range);
        for v in values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 20 || &bytes[..8] != MAGIC {
            return Err(Error::Weights("missing FRMLP001 header".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[8 + 4 * i..12 + 4 * i].try_into().unwrap());
        let (hidden, inputs, outputs) = (word(0) as usize, word(1) as usize, word(2) as usize);
        if (hidden, inputs, outputs) != (HIDDEN, INPUTS, 1) {
            return Err(Error::Weights(format!(
                "shape mismatch: header declares {hidden}×{inputs}×{outputs}, expected 48×3×1"
            )));
        }
        let body = &bytes[20..];
        let expected = HIDDEN * INPUTS + HIDDEN + HIDDEN + 1 + INPUTS * 2 + 2;
        if body.len() != expected * 8 {
            return Err(Error::Weights(format!(
                "payload holds {} bytes, expected {}",
                body.len(),
                expected * 8
            )));
        }
        let mut vals = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let mut take = |n: usize| -> Vec<f64> { vals.by_ref().take(n).collect() };
        let w1 = take(HIDDEN * INPUTS)
            .chunks(INPUTS)
            .map(<[f64]>::to_vec)
            .collect();
        let b1 = take(HIDDEN);
        let w2 = vec![take(HIDDEN)];
        let b2 = take(1);
        let input_ranges = take(INPUTS * 2).chunks(2).map(|c| [c[0], c[1]]).collect();
        let o = take(2);
        let m = Self {
            w1,
            b1,
            w2,
            b2,
            input_ranges,
            output_range: [o[0], o[1]],
        };
        m.validate()?;
        Ok(m)
    }

    /// Reads either flavour, choosing by the magic header.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.starts_with(MAGIC) {
            Self::from_bytes(&bytes)
        } else {
            let text = String::from_utf8(bytes)
                .map_err(|_| Error::Weights(format!("{}: neither binary nor UTF-8", path.display())))?;
            Self::from_json(&text)
        }
    }
}
