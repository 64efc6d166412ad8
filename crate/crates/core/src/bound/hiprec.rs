//! Dyadic big-integer intervals with directed rounding.
//!
//! Values are `m * 2^e` with an arbitrary-precision mantissa. Ring
//! operations are exact and then rounded outward to the working
//! precision; division and logarithm round each endpoint in its safe
//! direction. The logarithm uses the inverse hyperbolic tangent series
//! with a rigorous tail bound, so its enclosures hold at any precision.

use super::interval::{bump_down, bump_up, IntervalReal};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// An exact dyadic rational `m * 2^e`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    fn new(m: BigInt, e: i64) -> Dyadic {
        if m.is_zero() {
            return Dyadic { m, e: 0 };
        }
        let tz = m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            Dyadic { m: m >> tz, e: e + tz as i64 }
        } else {
            Dyadic { m, e }
        }
    }

    fn zero() -> Dyadic {
        Dyadic { m: BigInt::zero(), e: 0 }
    }

    fn from_u64(v: u64) -> Dyadic {
        Dyadic::new(BigInt::from(v), 0)
    }

    fn from_f64(v: f64) -> Dyadic {
        debug_assert!(v.is_finite());
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), biased - 1075)
        };
        Dyadic::new(BigInt::from(sign) * BigInt::from(mant), exp)
    }

    fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    fn is_positive(&self) -> bool {
        self.m.is_positive()
    }

    fn neg(&self) -> Dyadic {
        Dyadic { m: -self.m.clone(), e: self.e }
    }

    fn add(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as u64;
        let b = &o.m << (o.e - e) as u64;
        Dyadic::new(a + b, e)
    }

    fn sub(&self, o: &Dyadic) -> Dyadic {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic::new(&self.m * &o.m, self.e + o.e)
    }

    /// Exact multiplication by `2^s`.
    fn scale2(&self, s: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { m: self.m.clone(), e: self.e + s }
    }

    fn cmp(&self, o: &Dyadic) -> Ordering {
        match (self.m.sign(), o.m.sign()) {
            (Sign::Minus, Sign::NoSign | Sign::Plus) => return Ordering::Less,
            (Sign::NoSign, Sign::Plus) => return Ordering::Less,
            (Sign::Plus, Sign::NoSign | Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as u64;
        let b = &o.m << (o.e - e) as u64;
        a.cmp(&b)
    }

    fn min(self, o: Dyadic) -> Dyadic {
        if self.cmp(&o) == Ordering::Greater {
            o
        } else {
            self
        }
    }

    fn max(self, o: Dyadic) -> Dyadic {
        if self.cmp(&o) == Ordering::Less {
            o
        } else {
            self
        }
    }

    /// Rounds to at most `prec` mantissa bits, toward +inf when `up`,
    /// toward -inf otherwise.
    fn round_dir(&self, prec: u32, up: bool) -> Dyadic {
        let bits = self.m.magnitude().bits();
        if bits <= u64::from(prec) {
            return self.clone();
        }
        let shift = bits - u64::from(prec);
        let sign = self.m.sign();
        let mag = self.m.magnitude();
        let q = mag >> shift;
        let dropped = &(&q << shift) != mag;
        let mut q = BigInt::from_biguint(sign, q);
        if dropped {
            // Truncation of the magnitude moves toward zero; push one
            // step outward when that was the unsafe direction.
            if up && sign == Sign::Plus {
                q += 1;
            } else if !up && sign == Sign::Minus {
                q -= 1;
            }
        }
        Dyadic::new(q, self.e + shift as i64)
    }

    /// Directed quotient with roughly `prec` significant bits.
    fn div_dir(&self, o: &Dyadic, prec: u32, up: bool) -> Dyadic {
        assert!(!o.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let abits = self.m.magnitude().bits() as i64;
        let bbits = o.m.magnitude().bits() as i64;
        let shift = (i64::from(prec) + 2 + bbits - abits).max(0) as u64;
        let num = &self.m << shift;
        let (mut q, r) = num.div_rem(&o.m);
        if !r.is_zero() {
            let positive = self.m.sign() == o.m.sign();
            if up && positive {
                q += 1;
            } else if !up && !positive {
                q -= 1;
            }
        }
        Dyadic::new(q, self.e - o.e - shift as i64).round_dir(prec, up)
    }

    /// Double view that never crosses the true value in the unsafe
    /// direction. Exactly representable values convert without any
    /// widening, so integer endpoints survive the round trip.
    fn to_f64_dir(&self, up: bool) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round_dir(52, up);
        let mant = r.m.to_f64().expect("52-bit mantissa");
        let exp = r.e.clamp(-1200, 1200) as i32;
        let mut v = mant * 2f64.powi(exp);
        if v == f64::INFINITY && !up {
            v = f64::MAX;
        } else if v == f64::NEG_INFINITY && up {
            v = f64::MIN;
        } else if v == 0.0 {
            // Underflow: substitute the smallest value on the safe side.
            return if up {
                if self.is_positive() { f64::from_bits(1) } else { 0.0 }
            } else if self.is_positive() {
                0.0
            } else {
                -f64::from_bits(1)
            };
        }
        if v.is_finite() && Dyadic::from_f64(v) == *self {
            return v;
        }
        if up {
            bump_up(v)
        } else {
            bump_down(v)
        }
    }
}

/// Enclosure of `atanh` over `[t_lo, t_hi]` with `0 <= t_lo <= t_hi < 1/2`,
/// by the odd power series with an explicit geometric tail bound.
fn atanh_encl(t_lo: &Dyadic, t_hi: &Dyadic, prec: u32) -> (Dyadic, Dyadic) {
    debug_assert!(t_lo.cmp(&Dyadic::zero()) != Ordering::Less);
    debug_assert!(t_hi.cmp(&Dyadic::new(BigInt::from(1), -1)) == Ordering::Less);
    let terms = (prec as usize) / 3 + 4;
    let sq_lo = t_lo.mul(t_lo).round_dir(prec, false);
    let sq_hi = t_hi.mul(t_hi).round_dir(prec, true);
    let mut pow_lo = t_lo.clone();
    let mut pow_hi = t_hi.clone();
    let mut sum_lo = t_lo.clone();
    let mut sum_hi = t_hi.clone();
    for j in 1..=terms {
        pow_lo = pow_lo.mul(&sq_lo).round_dir(prec, false);
        pow_hi = pow_hi.mul(&sq_hi).round_dir(prec, true);
        let odd = Dyadic::from_u64(2 * j as u64 + 1);
        sum_lo = sum_lo.add(&pow_lo.div_dir(&odd, prec, false)).round_dir(prec, false);
        sum_hi = sum_hi.add(&pow_hi.div_dir(&odd, prec, true)).round_dir(prec, true);
    }
    // Remaining terms are positive and bounded by the geometric series
    // t^(2J+3) / ((2J+3) (1 - t^2)).
    let next_pow = pow_hi.mul(&sq_hi).round_dir(prec, true);
    let denom = Dyadic::from_u64(1).sub(&sq_hi);
    let tail = next_pow
        .div_dir(&denom, prec, true)
        .div_dir(&Dyadic::from_u64(2 * terms as u64 + 3), prec, true);
    sum_hi = sum_hi.add(&tail).round_dir(prec, true);
    (sum_lo, sum_hi)
}

fn ln2_encl(prec: u32) -> (Dyadic, Dyadic) {
    static CACHE: OnceLock<Mutex<HashMap<u32, (Dyadic, Dyadic)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&prec) {
        return hit.clone();
    }
    // ln 2 = 2 atanh(1/3).
    let one = Dyadic::from_u64(1);
    let three = Dyadic::from_u64(3);
    let t_lo = one.div_dir(&three, prec + 8, false);
    let t_hi = one.div_dir(&three, prec + 8, true);
    let (a_lo, a_hi) = atanh_encl(&t_lo, &t_hi, prec + 8);
    let out = (a_lo.scale2(1).round_dir(prec, false), a_hi.scale2(1).round_dir(prec, true));
    cache.lock().unwrap().insert(prec, out.clone());
    out
}

/// Directed enclosure of `log2` of a positive dyadic.
fn log2_encl(d: &Dyadic, prec: u32) -> (Dyadic, Dyadic) {
    debug_assert!(d.is_positive());
    let wprec = prec + 16;
    let bits = d.m.magnitude().bits() as i64;
    // d = mant * 2^s with mant in [1, 2).
    let s = bits - 1 + d.e;
    let mant = Dyadic { m: d.m.clone(), e: 1 - bits };
    let one = Dyadic::from_u64(1);
    // t = (mant - 1) / (mant + 1) in [0, 1/3).
    let num = mant.sub(&one);
    let den = mant.add(&one);
    let (ln_lo, ln_hi) = if num.is_zero() {
        (Dyadic::zero(), Dyadic::zero())
    } else {
        let t_lo = num.div_dir(&den, wprec, false);
        let t_hi = num.div_dir(&den, wprec, true);
        let (a_lo, a_hi) = atanh_encl(&t_lo, &t_hi, wprec);
        (a_lo.scale2(1), a_hi.scale2(1))
    };
    let (l2_lo, l2_hi) = ln2_encl(wprec);
    let frac_lo = ln_lo.div_dir(&l2_hi, wprec, false);
    let frac_hi = ln_hi.div_dir(&l2_lo, wprec, true);
    let shift = Dyadic::new(BigInt::from(s), 0);
    (
        shift.add(&frac_lo).round_dir(prec, false),
        shift.add(&frac_hi).round_dir(prec, true),
    )
}

/// Interval of dyadics at a fixed working precision.
#[derive(Debug, Clone)]
pub(crate) struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl DyadicInterval {
    fn out(lo: Dyadic, hi: Dyadic, prec: u32) -> DyadicInterval {
        debug_assert!(lo.cmp(&hi) != Ordering::Greater);
        DyadicInterval {
            lo: lo.round_dir(prec, false),
            hi: hi.round_dir(prec, true),
            prec,
        }
    }
}

impl IntervalReal for DyadicInterval {
    type Ctx = u32;

    fn from_f64(v: f64, prec: u32) -> Self {
        let d = Dyadic::from_f64(v);
        DyadicInterval::out(d.clone(), d, prec)
    }

    fn from_u64(v: u64, prec: u32) -> Self {
        let d = Dyadic::from_u64(v);
        DyadicInterval::out(d.clone(), d, prec)
    }

    fn add(&self, o: &Self) -> Self {
        DyadicInterval::out(self.lo.add(&o.lo), self.hi.add(&o.hi), self.prec.max(o.prec))
    }

    fn sub(&self, o: &Self) -> Self {
        DyadicInterval::out(self.lo.sub(&o.hi), self.hi.sub(&o.lo), self.prec.max(o.prec))
    }

    fn mul(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        let cands = [
            self.lo.mul(&o.lo),
            self.lo.mul(&o.hi),
            self.hi.mul(&o.lo),
            self.hi.mul(&o.hi),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            lo = lo.min(c.clone());
            hi = hi.max(c.clone());
        }
        DyadicInterval::out(lo, hi, prec)
    }

    fn div(&self, o: &Self) -> Option<Self> {
        let zero = Dyadic::zero();
        let den_pos = o.lo.cmp(&zero) == Ordering::Greater;
        let den_neg = o.hi.cmp(&zero) == Ordering::Less;
        if !den_pos && !den_neg {
            return None;
        }
        let prec = self.prec.max(o.prec);
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for num in [&self.lo, &self.hi] {
            for den in [&o.lo, &o.hi] {
                let down = num.div_dir(den, prec, false);
                let up = num.div_dir(den, prec, true);
                lo = Some(match lo {
                    None => down,
                    Some(v) => v.min(down),
                });
                hi = Some(match hi {
                    None => up,
                    Some(v) => v.max(up),
                });
            }
        }
        Some(DyadicInterval::out(lo.unwrap(), hi.unwrap(), prec))
    }

    fn log2(&self) -> Option<Self> {
        if self.lo.cmp(&Dyadic::zero()) != Ordering::Greater {
            return None;
        }
        let (lo, _) = log2_encl(&self.lo, self.prec);
        let (_, hi) = log2_encl(&self.hi, self.prec);
        Some(DyadicInterval { lo, hi, prec: self.prec })
    }

    fn lo_f64(&self) -> f64 {
        self.lo.to_f64_dir(false)
    }

    fn hi_f64(&self) -> f64 {
        self.hi.to_f64_dir(true)
    }

    fn lo_point(&self) -> Self {
        DyadicInterval {
            lo: self.lo.clone(),
            hi: self.lo.clone(),
            prec: self.prec,
        }
    }

    fn hi_point(&self) -> Self {
        DyadicInterval {
            lo: self.hi.clone(),
            hi: self.hi.clone(),
            prec: self.prec,
        }
    }

    fn hull(&self, o: &Self) -> Self {
        DyadicInterval {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
            prec: self.prec.max(o.prec),
        }
    }

    fn clamp01(&self) -> Self {
        let zero = Dyadic::zero();
        let one = Dyadic::from_u64(1);
        DyadicInterval {
            lo: self.lo.clone().max(zero.clone()).min(one.clone()),
            hi: self.hi.clone().min(one).max(zero),
            prec: self.prec,
        }
    }

    fn contains_half(&self) -> bool {
        let half = Dyadic::new(BigInt::from(1), -1);
        self.lo.cmp(&half) != Ordering::Greater && self.hi.cmp(&half) != Ordering::Less
    }
}
