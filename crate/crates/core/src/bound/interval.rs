//! Self-validating arithmetic for the certification engine.
//!
//! Every quantity is carried as an enclosing interval, so a computed
//! sign is a proof: an interval with positive lower endpoint certifies
//! a positive value no matter how the rounding fell. Two backends
//! implement the same small trait: hardware doubles widened outward by
//! one step per operation (a few steps for logarithms, whose libm error
//! is not formally specified), and the dyadic big-integer intervals in
//! [`super::hiprec`] for configurable precision.

/// Interval backend used by the rate-function certification.
pub(crate) trait IntervalReal: Clone {
    /// Constructor context: nothing for doubles, mantissa bits for the
    /// dyadic backend.
    type Ctx: Copy + Send + Sync;

    fn from_f64(v: f64, ctx: Self::Ctx) -> Self;
    fn from_u64(v: u64, ctx: Self::Ctx) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `None` when the divisor interval contains zero.
    fn div(&self, o: &Self) -> Option<Self>;
    /// Base-2 logarithm; `None` unless the interval is strictly positive.
    fn log2(&self) -> Option<Self>;
    /// Outward-rounded double views of the endpoints.
    fn lo_f64(&self) -> f64;
    fn hi_f64(&self) -> f64;
    /// Zero-width intervals at the endpoints.
    fn lo_point(&self) -> Self;
    fn hi_point(&self) -> Self;
    fn hull(&self, o: &Self) -> Self;
    fn clamp01(&self) -> Self;
    fn contains_half(&self) -> bool;

    fn strictly_positive(&self) -> bool {
        self.lo_f64() > 0.0
    }

    fn strictly_negative(&self) -> bool {
        self.hi_f64() < 0.0
    }
}

/// Next double above `x` (toward +inf).
pub(crate) fn bump_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}

/// Next double below `x` (toward -inf).
pub(crate) fn bump_down(x: f64) -> f64 {
    if x.is_nan() || x == f64::NEG_INFINITY {
        return x;
    }
    if x == 0.0 {
        return -f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits - 1 } else { bits + 1 })
}

/// Hardware-double interval. IEEE arithmetic rounds to nearest, so one
/// outward step after each exact operation encloses the true result.
#[derive(Debug, Clone, Copy)]
pub(crate) struct F64Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Outward steps taken after a libm log2 call. The platform library is
/// good to an ulp or so; three steps leave comfortable room.
const LOG_SLACK_STEPS: u32 = 3;

fn step(mut x: f64, n: u32, up: bool) -> f64 {
    for _ in 0..n {
        x = if up { bump_up(x) } else { bump_down(x) };
    }
    x
}

impl F64Interval {
    fn new(lo: f64, hi: f64) -> F64Interval {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        F64Interval { lo, hi }
    }
}

impl IntervalReal for F64Interval {
    type Ctx = ();

    fn from_f64(v: f64, _ctx: ()) -> Self {
        F64Interval::new(v, v)
    }

    fn from_u64(v: u64, _ctx: ()) -> Self {
        let r = v as f64;
        if r as u128 == u128::from(v) {
            F64Interval::new(r, r)
        } else {
            F64Interval::new(bump_down(r), bump_up(r))
        }
    }

    fn add(&self, o: &Self) -> Self {
        F64Interval::new(bump_down(self.lo + o.lo), bump_up(self.hi + o.hi))
    }

    fn sub(&self, o: &Self) -> Self {
        F64Interval::new(bump_down(self.lo - o.hi), bump_up(self.hi - o.lo))
    }

    fn mul(&self, o: &Self) -> Self {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        F64Interval::new(bump_down(lo), bump_up(hi))
    }

    fn div(&self, o: &Self) -> Option<Self> {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return None;
        }
        let c = [
            self.lo / o.lo,
            self.lo / o.hi,
            self.hi / o.lo,
            self.hi / o.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(F64Interval::new(bump_down(lo), bump_up(hi)))
    }

    fn log2(&self) -> Option<Self> {
        if self.lo <= 0.0 {
            return None;
        }
        Some(F64Interval::new(
            step(self.lo.log2(), LOG_SLACK_STEPS, false),
            step(self.hi.log2(), LOG_SLACK_STEPS, true),
        ))
    }

    fn lo_f64(&self) -> f64 {
        self.lo
    }

    fn hi_f64(&self) -> f64 {
        self.hi
    }

    fn lo_point(&self) -> Self {
        F64Interval::new(self.lo, self.lo)
    }

    fn hi_point(&self) -> Self {
        F64Interval::new(self.hi, self.hi)
    }

    fn hull(&self, o: &Self) -> Self {
        F64Interval::new(self.lo.min(o.lo), self.hi.max(o.hi))
    }

    fn clamp01(&self) -> Self {
        F64Interval::new(self.lo.clamp(0.0, 1.0), self.hi.clamp(0.0, 1.0))
    }

    fn contains_half(&self) -> bool {
        self.lo <= 0.5 && 0.5 <= self.hi
    }
}
