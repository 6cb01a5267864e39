//! Polynomial helpers for coefficient vectors in descending powers of z.

/// Value at z = 1, i.e. the plain coefficient sum.
pub fn eval_at_one(coeffs: &[f64]) -> f64 {
    coeffs.iter().sum()
}

/// Horner evaluation at a real point.
pub fn eval(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, c| acc * z + c)
}

/// Schur–Cohn step-down test: true when every root lies strictly inside the
/// unit circle. The leading coefficient must be nonzero.
pub fn is_schur_stable(coeffs: &[f64]) -> bool {
    let lead = match coeffs.first() {
        Some(&c) if c != 0.0 => c,
        _ => return false,
    };
    let mut a: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    while a.len() > 1 {
        let n = a.len() - 1;
        let k = a[n];
        if !k.is_finite() || k.abs() >= 1.0 {
            return false;
        }
        let scale = 1.0 - k * k;
        a = (0..n).map(|i| (a[i] - k * a[n - i]) / scale).collect();
    }
    true
}
