//! Straight-line recurrences for every block, written without the block
//! types. Each check returns `(case, deviation)` where the deviation is the
//! max abs difference over the run, scaled by the signal size for the
//! linear filters.

#![allow(dead_code)]

use freqreg::blocks::{
    ButterworthFilter, DelayLine, DiscreteTransferFunction, PiClampController, RateLimiter,
    SrLatch, TfCoefficients,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STEPS: usize = 1000;
pub const TOL: f64 = 1e-9;

pub type Report = Vec<(String, f64)>;

fn inputs(seed: u64, scale: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..STEPS).map(|_| rng.gen_range(-scale..scale)).collect()
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn scaled_dev(got: &[f64], want: &[f64]) -> f64 {
    let scale = want.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    max_dev(got, want) / scale
}

/// y[n] = (Σ b_i·u[n−d−i] − Σ_{j≥1} a_j·y[n−j]) / a_0 with the numerator
/// right-aligned to the denominator (d = deg den − deg num). Histories start
/// at `u_hist`/`y_hist`.
fn recurrence(num: &[f64], den: &[f64], u: &[f64], u_hist: f64, y_hist: f64) -> Vec<f64> {
    let d = den.len() - num.len();
    let mut us: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let u_at = |us: &Vec<f64>, k: isize| if k < 0 { u_hist } else { us[k as usize] };
    let y_at = |ys: &Vec<f64>, k: isize| if k < 0 { y_hist } else { ys[k as usize] };
    for (n, &x) in u.iter().enumerate() {
        us.push(x);
        let n = n as isize;
        let mut acc = 0.0;
        for (i, b) in num.iter().enumerate() {
            acc += b * u_at(&us, n - d as isize - i as isize);
        }
        for (j, a) in den.iter().enumerate().skip(1) {
            acc -= a * y_at(&ys, n - j as isize);
        }
        ys.push(acc / den[0]);
    }
    ys
}

fn tf_cases() -> Vec<(&'static str, Vec<f64>, Vec<f64>)> {
    vec![
        ("TG", vec![3.45, 0.0, 1.58], vec![3.78, 1.47, 0.0, 0.0]),
        ("C fess", vec![4.23, 1.06, 2.8], vec![1.0, 0.57, 0.42]),
        ("D fess", vec![5.57, 6.72, 3.02], vec![1.0, 0.72, 0.81]),
        ("C bess", vec![0.16, 4.11, 7.52], vec![1.0, 0.93, 0.54]),
        ("D bess", vec![2.88, 3.78, 4.57], vec![1.0, 0.48, 0.55]),
        (
            "F",
            vec![0.51e-5, -1.97e-5, 2.31e-5, 2.93e-5, -1.18e-5, -2.73e-5],
            vec![1.0, -0.45, -0.77, -0.23, 0.6, -0.12],
        ),
        ("integrator", vec![1.0], vec![1.0, -1.0]),
        ("first order", vec![0.5], vec![2.0, -1.0]),
    ]
}

pub fn transfer_functions_zero_state() -> Report {
    let u = inputs(1, 50.0);
    tf_cases()
        .into_iter()
        .map(|(name, num, den)| {
            let mut tf =
                DiscreteTransferFunction::new(name, &TfCoefficients::new(&num, &den)).unwrap();
            let got: Vec<f64> = u.iter().map(|&x| tf.step(x).unwrap()).collect();
            let want = recurrence(&num, &den, &u, 0.0, 0.0);
            (format!("tf {name}"), scaled_dev(&got, &want))
        })
        .collect()
}

pub fn transfer_functions_steady_start() -> Report {
    let u = inputs(2, 10.0);
    tf_cases()
        .into_iter()
        .filter_map(|(name, num, den)| {
            let gain = num.iter().sum::<f64>() / den.iter().sum::<f64>();
            if !gain.is_finite() {
                return None;
            }
            let mut tf = DiscreteTransferFunction::new(name, &TfCoefficients::new(&num, &den))
                .unwrap()
                .with_steady_start();
            let got: Vec<f64> = u.iter().map(|&x| tf.step(x).unwrap()).collect();
            let want = recurrence(&num, &den, &u, u[0], gain * u[0]);
            Some((format!("tf {name} steady"), scaled_dev(&got, &want)))
        })
        .collect()
}

pub fn butterworth() -> Report {
    let u = inputs(3, 300.0);
    [(0.974, 0.097), (1.0, 0.5), (0.6, 2.0)]
        .into_iter()
        .map(|(cf, w0)| {
            let mut f = ButterworthFilter::new(cf, w0).unwrap();
            let got: Vec<f64> = u.iter().map(|&x| f.step(x).unwrap()).collect();
            // analog cutoff prewarped to w0, s = 2(z−1)/(z+1) at T = 1
            let wc = 2.0 * (w0 / 2.0).tan();
            let (b, a0, a1) = (cf * wc, 2.0 + wc, wc - 2.0);
            let mut want = Vec::new();
            let (mut u_prev, mut y_prev) = (u[0], cf * u[0]);
            for &x in &u {
                let y = (b * (x + u_prev) - a1 * y_prev) / a0;
                want.push(y);
                u_prev = x;
                y_prev = y;
            }
            (format!("butterworth cf {cf} w0 {w0}"), scaled_dev(&got, &want))
        })
        .collect()
}

pub fn delay_lines() -> Report {
    let u = inputs(4, 1.0);
    [0usize, 1, 4, 30, 999]
        .into_iter()
        .map(|d| {
            let mut line = DelayLine::new(d);
            let got: Vec<f64> = u.iter().map(|&x| line.step(x)).collect();
            let want: Vec<f64> =
                (0..STEPS).map(|n| if n >= d { u[n - d] } else { u[0] }).collect();
            (format!("delay {d}"), max_dev(&got, &want))
        })
        .collect()
}

pub fn rate_limiters() -> Report {
    let u = inputs(5, 10.0);
    [(0.6, -0.6), (50.0 / 60.0, -50.0 / 60.0), (1.28, -0.2)]
        .into_iter()
        .map(|(rise, fall)| {
            let mut rl = RateLimiter::new(rise, fall);
            let got: Vec<f64> = u.iter().map(|&x| rl.step(x)).collect();
            let mut y = 0.0f64;
            let want: Vec<f64> = u
                .iter()
                .map(|&x| {
                    let d = x - y;
                    y = if d > rise {
                        y + rise
                    } else if d < fall {
                        y + fall
                    } else {
                        x
                    };
                    y
                })
                .collect();
            (format!("rate limiter {rise}/{fall}"), max_dev(&got, &want))
        })
        .collect()
}

pub fn pi_clamping() -> Report {
    let u = inputs(6, 400.0);
    [(0.42, 0.022, -100.0, 100.0), (1.0, 0.3, -5.0, 20.0)]
        .into_iter()
        .map(|(kp, ki, lo, hi)| {
            let mut pi = PiClampController::new(kp, ki, lo, hi);
            let got: Vec<f64> = u.iter().map(|&e| pi.step(e)).collect();
            let mut integ = 0.0f64;
            let want: Vec<f64> = u
                .iter()
                .map(|&e| {
                    let next = integ + ki * e;
                    let raw = kp * e + next;
                    if raw > hi && ki * e > 0.0 {
                        // the integrator may only close the gap to the bound
                        integ = f64::max(integ, hi - kp * e);
                    } else if raw < lo && ki * e < 0.0 {
                        integ = f64::min(integ, lo - kp * e);
                    } else {
                        integ = next;
                    }
                    f64::min(f64::max(kp * e + integ, lo), hi)
                })
                .collect();
            (format!("pi kp {kp} ki {ki}"), max_dev(&got, &want))
        })
        .collect()
}

pub fn latches() -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut latch = SrLatch::default();
    let mut q = false;
    let mut mismatches = 0usize;
    for _ in 0..STEPS {
        let (s, r): (bool, bool) = (rng.gen(), rng.gen());
        q = s || (q && !r);
        if latch.step(s, r) != q {
            mismatches += 1;
        }
    }
    vec![("sr latch".into(), mismatches as f64)]
}

pub fn all_blocks() -> Report {
    [
        transfer_functions_zero_state(),
        transfer_functions_steady_start(),
        butterworth(),
        delay_lines(),
        rate_limiters(),
        pi_clamping(),
        latches(),
    ]
    .concat()
}
