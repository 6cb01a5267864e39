/// Slew limiter with separate rising and falling bounds (units per second,
/// applied per 1 s step).
#[derive(Debug, Clone)]
pub struct RateLimiter {
    max_rise: f64,
    max_fall: f64,
    last_output: f64,
}

impl RateLimiter {
    /// `max_rise > 0 > max_fall`; starts from an output of zero.
    pub fn new(max_rise: f64, max_fall: f64) -> Self {
        debug_assert!(max_rise > 0.0 && max_fall < 0.0);
        Self {
            max_rise,
            max_fall,
            last_output: 0.0,
        }
    }

    /// Symmetric limiter from a rate given in units per minute.
    pub fn per_minute(rate: f64) -> Self {
        Self::new(rate / 60.0, -rate / 60.0)
    }

    pub fn with_initial(mut self, output: f64) -> Self {
        self.last_output = output;
        self
    }

    pub fn max_rise(&self) -> f64 {
        self.max_rise
    }

    pub fn max_fall(&self) -> f64 {
        self.max_fall
    }

    pub fn last_output(&self) -> f64 {
        self.last_output
    }

    pub fn step(&mut self, u: f64) -> f64 {
        let delta = (u - self.last_output).clamp(self.max_fall, self.max_rise);
        // land exactly on the target once it is within reach
        self.last_output = if delta == u - self.last_output {
            u
        } else {
            self.last_output + delta
        };
        self.last_output
    }
}
