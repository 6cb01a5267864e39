use serde::{Deserialize, Serialize};

use super::poly;
use crate::error::{Error, Result};

/// Numerator and denominator coefficients in descending powers of z, as they
/// appear in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfCoefficients {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl TfCoefficients {
    pub fn new(num: &[f64], den: &[f64]) -> Self {
        Self {
            num: num.to_vec(),
            den: den.to_vec(),
        }
    }

    pub fn identity() -> Self {
        Self::new(&[1.0], &[1.0])
    }

    pub fn dc_gain(&self) -> f64 {
        poly::eval_at_one(&self.num) / poly::eval_at_one(&self.den)
    }

    pub fn is_stable(&self) -> bool {
        poly::is_schur_stable(&self.den)
    }
}

/// Rational function of z realized as a difference equation.
///
/// With `H(z) = (b0 z^n + … + bn) / (a0 z^n + … + an)` the block computes
/// `a0·y[t] = Σ b_i·u[t−i] − Σ_{i≥1} a_i·y[t−i]`.
#[derive(Debug, Clone)]
pub struct DiscreteTransferFunction {
    name: String,
    coeffs: TfCoefficients,
    b: Vec<f64>,
    a: Vec<f64>,
    // most recent first: u[t-1], u[t-2], ...
    past_u: Vec<f64>,
    past_y: Vec<f64>,
    steady_start: bool,
    started: bool,
}

impl DiscreteTransferFunction {
    /// Zero-state realization. Rejects improper or degenerate coefficient sets.
    pub fn new(name: impl Into<String>, coeffs: &TfCoefficients) -> Result<Self> {
        let name = name.into();
        let TfCoefficients { num, den } = coeffs;
        if den.is_empty() || num.is_empty() {
            return Err(Error::config(format!("{name}: empty coefficient list")));
        }
        if den[0] == 0.0 {
            return Err(Error::config(format!(
                "{name}: leading denominator coefficient is zero"
            )));
        }
        if num.len() > den.len() {
            return Err(Error::config(format!(
                "{name}: improper transfer function (numerator order {} > denominator order {})",
                num.len() - 1,
                den.len() - 1
            )));
        }
        if num.iter().chain(den).any(|c| !c.is_finite()) {
            return Err(Error::config(format!("{name}: non-finite coefficient")));
        }
        let n = den.len() - 1;
        let a0 = den[0];
        let mut b = vec![0.0; den.len() - num.len()];
        b.extend(num.iter().map(|c| c / a0));
        let a = den.iter().map(|c| c / a0).collect();
        Ok(Self {
            name,
            coeffs: coeffs.clone(),
            b,
            a,
            past_u: vec![0.0; n],
            past_y: vec![0.0; n],
            steady_start: false,
            started: false,
        })
    }

    /// Like [`new`](Self::new) but additionally requires all poles strictly
    /// inside the unit circle.
    pub fn new_stable(name: impl Into<String>, coeffs: &TfCoefficients) -> Result<Self> {
        let tf = Self::new(name, coeffs)?;
        if !coeffs.is_stable() {
            return Err(Error::Unstable { block: tf.name });
        }
        Ok(tf)
    }

    /// Start from the steady state of the first input instead of zero.
    /// Has no effect for marginal systems (pole at z = 1).
    pub fn with_steady_start(mut self) -> Self {
        self.steady_start = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coefficients(&self) -> &TfCoefficients {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    pub fn dc_gain(&self) -> f64 {
        self.coeffs.dc_gain()
    }

    /// Sets the internal history to the equilibrium for a constant input `u`.
    pub fn prime(&mut self, u: f64) {
        let den_sum = poly::eval_at_one(&self.a);
        if den_sum == 0.0 {
            return;
        }
        let y = u * poly::eval_at_one(&self.b) / den_sum;
        self.past_u.fill(u);
        self.past_y.fill(y);
    }

    pub fn reset(&mut self) {
        self.past_u.fill(0.0);
        self.past_y.fill(0.0);
        self.started = false;
    }

    pub fn step(&mut self, u: f64) -> Result<f64> {
        if !u.is_finite() {
            return Err(Error::NonFinite {
                block: self.name.clone(),
                value: u,
            });
        }
        if !self.started {
            self.started = true;
            if self.steady_start {
                self.prime(u);
            }
        }
        let mut y = self.b[0] * u;
        for i in 1..self.b.len() {
            y += self.b[i] * self.past_u[i - 1] - self.a[i] * self.past_y[i - 1];
        }
        if !self.past_u.is_empty() {
            self.past_u.rotate_right(1);
            self.past_u[0] = u;
            self.past_y.rotate_right(1);
            self.past_y[0] = y;
        }
        Ok(y)
    }
}
