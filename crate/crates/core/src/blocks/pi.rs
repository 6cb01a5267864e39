/// Discrete PI controller with output saturation and clamping anti-windup.
///
/// `u[t] = kp·e[t] + I[t]`, `I[t] = I[t−1] + ki·e[t]`. The integrator update
/// is skipped whenever it would leave the output saturated in the direction
/// the error is pushing.
#[derive(Debug, Clone)]
pub struct PiClampController {
    kp: f64,
    ki: f64,
    integrator: f64,
    lower: f64,
    upper: f64,
}

impl PiClampController {
    pub fn new(kp: f64, ki: f64, lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper);
        Self {
            kp,
            ki,
            integrator: 0.0,
            lower,
            upper,
        }
    }

    pub fn set_bounds(&mut self, lower: f64, upper: f64) {
        debug_assert!(lower <= upper);
        self.lower = lower;
        self.upper = upper;
    }

    pub fn integrator(&self) -> f64 {
        self.integrator
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn step(&mut self, e: f64) -> f64 {
        self.step_with_flag(e).0
    }

    /// Returns the output and whether the integrator was held this step.
    pub fn step_with_flag(&mut self, e: f64) -> (f64, bool) {
        let candidate = self.integrator + self.ki * e;
        let unclamped = self.kp * e + candidate;
        let push = self.ki * e;
        let before = self.integrator;
        if unclamped > self.upper && push > 0.0 {
            // integrate only up to the point where the output meets the bound
            self.integrator = before.max(self.upper - self.kp * e);
        } else if unclamped < self.lower && push < 0.0 {
            self.integrator = before.min(self.lower - self.kp * e);
        } else {
            self.integrator = candidate;
        }
        let held = self.integrator == before && push != 0.0;
        let u = (self.kp * e + self.integrator).clamp(self.lower, self.upper);
        (u, held)
    }
}
