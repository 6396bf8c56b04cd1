use std::fmt;

use serde::{Deserialize, Serialize};

/// Finite-precision policy shared by every truncating operation.
///
/// Loop modes are kept in the window `[-neg, pos]`; any monomial whose degree in
/// negative-mode loop variables reaches `nilpotency` is zero. `weight_bound`
/// and `b0_cap` bound the Heisenberg bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationContext {
    pub charts: usize,
    pub neg: i64,
    pub pos: i64,
    pub nilpotency: u32,
    pub weight_bound: u32,
    pub b0_cap: u32,
}

impl TruncationContext {
    pub fn new(charts: usize, neg: i64, pos: i64, nilpotency: u32) -> Self {
        assert!(charts >= 1, "at least one chart");
        assert!(neg >= 0 && pos >= 0, "window bounds must be non-negative");
        assert!(nilpotency >= 1, "nilpotency order must be positive");
        TruncationContext {
            charts,
            neg,
            pos,
            nilpotency,
            weight_bound: 0,
            b0_cap: 0,
        }
    }

    pub fn with_weight(mut self, weight_bound: u32, b0_cap: u32) -> Self {
        self.weight_bound = weight_bound;
        self.b0_cap = b0_cap;
        self
    }

    pub fn with_window(mut self, neg: i64, pos: i64) -> Self {
        assert!(neg >= 0 && pos >= 0, "window bounds must be non-negative");
        self.neg = neg;
        self.pos = pos;
        self
    }

    pub fn with_nilpotency(mut self, nilpotency: u32) -> Self {
        assert!(nilpotency >= 1);
        self.nilpotency = nilpotency;
        self
    }

    #[inline]
    pub fn in_window(&self, mode: i64) -> bool {
        -self.neg <= mode && mode <= self.pos
    }
}

impl fmt::Display for TruncationContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={} M={} L={} eps={} W={} b0cap={}",
            self.charts, self.neg, self.pos, self.nilpotency, self.weight_bound, self.b0_cap
        )
    }
}
