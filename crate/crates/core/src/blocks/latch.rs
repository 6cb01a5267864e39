/// Set-dominant SR flip-flop: `q[t] = min(1, S[t] + q[t−1]·(1 − R[t]))`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SrLatch {
    q: bool,
}

impl SrLatch {
    pub fn new(q: bool) -> Self {
        Self { q }
    }

    pub fn q(&self) -> bool {
        self.q
    }

    pub fn step(&mut self, set: bool, reset: bool) -> bool {
        self.q = set || (self.q && !reset);
        self.q
    }
}
