//! Correction factors applied to the C(z)/D(z) energy estimates once the
//! SoC latches are active.

use super::params::EssParams;

/// Latch outputs feeding the correction block.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Latches {
    pub k_up: bool,
    pub k_dw: bool,
}

/// Flywheel case tables. `eq` is set while the output sits on the moving
/// base-point.
pub fn correction_factor_fess(
    in_c: f64,
    in_d: f64,
    latches: Latches,
    params: &EssParams,
    eq: bool,
) -> (f64, f64) {
    let Latches { k_up, k_dw } = latches;
    let cf_eq = params.cf_eq.unwrap_or(1.0);
    let out_c = match (k_up, k_dw) {
        (false, false) => in_c,
        _ if eq => in_c * cf_eq,
        (true, _) => in_c * params.cf1_c,
        (false, true) => in_c * params.cf2_c,
    };
    let out_d = match (k_up, k_dw) {
        (false, false) => in_d,
        (_, true) => in_d * params.cf1_d,
        (true, false) => in_d * params.cf2_d,
    };
    (out_c, out_d)
}

/// Battery case tables, with the SoC-dependent multipliers.
pub fn correction_factor_bess(
    in_c: f64,
    in_d: f64,
    latches: Latches,
    soc: f64,
    params: &EssParams,
) -> (f64, f64) {
    let Latches { k_up, k_dw } = latches;
    let up = 1.0 + soc;
    let out_c = match (k_up, k_dw) {
        (false, false) => in_c,
        (true, _) => in_c / up * params.cf1_c,
        (false, true) => in_c * up * params.cf2_c,
    };
    let out_d = match (k_up, k_dw) {
        (false, false) => in_d,
        (_, true) => in_d * up * params.cf1_d,
        (true, false) => in_d / up * params.cf2_d,
    };
    (out_c, out_d)
}
