use std::collections::VecDeque;

/// Pure transport delay of a whole number of samples.
///
/// Until `delay_steps` samples have been pushed the output is the fill
/// value, which defaults to the first input sample.
#[derive(Debug, Clone)]
pub struct DelayLine {
    delay_steps: usize,
    fill: Option<f64>,
    buffer: VecDeque<f64>,
}

impl DelayLine {
    pub fn new(delay_steps: usize) -> Self {
        Self {
            delay_steps,
            fill: None,
            buffer: VecDeque::with_capacity(delay_steps + 1),
        }
    }

    pub fn with_fill(delay_steps: usize, fill: f64) -> Self {
        Self {
            fill: Some(fill),
            ..Self::new(delay_steps)
        }
    }

    pub fn delay_steps(&self) -> usize {
        self.delay_steps
    }

    pub fn step(&mut self, u: f64) -> f64 {
        if self.delay_steps == 0 {
            return u;
        }
        if self.buffer.is_empty() {
            let fill = *self.fill.get_or_insert(u);
            self.buffer.extend(std::iter::repeat_n(fill, self.delay_steps));
        }
        self.buffer.push_back(u);
        self.buffer.pop_front().unwrap_or(u)
    }
}
