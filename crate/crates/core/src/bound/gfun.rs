//! The exponential rate function behind the lower bound.
//!
//! For alphabet size `k`, cost ratio `beta`, and deletion fraction
//! `delta`, the rate is
//!
//! ```text
//! g(beta, delta) = (beta - 2 delta) log2(k-1) - (1 - delta) log2 k
//!                + 2 H(delta) + (1 - delta) H((beta - 2 delta) / (1 - delta))
//! ```
//!
//! with `H` the binary entropy. For fixed `beta`, `g` is strictly
//! concave in `delta` on `[0, beta/2]`, its slope runs from `+inf` at 0
//! to `-inf` at `beta/2`, and the lower-bound machinery only ever needs
//! the sign of its maximum. Plain double versions are exposed for
//! inspection and table work; the certification engine evaluates the
//! same expressions in interval arithmetic through [`GEval`].

use super::interval::IntervalReal;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

fn check_k(k: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::AlphabetTooSmall(k));
    }
    Ok(())
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::domain(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

/// Binary entropy `H(x) = -x log2 x - (1-x) log2(1-x)`, with
/// `H(0) = H(1) = 0`.
pub fn entropy(x: f64) -> Result<f64> {
    check_unit("entropy argument", x)?;
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// `H'(x) = log2((1-x)/x)` on the open unit interval.
pub fn entropy_d1(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain(format!(
            "entropy derivative needs 0 < x < 1, got {x}"
        )));
    }
    Ok(((1.0 - x) / x).log2())
}

/// `H''(x) = -log2(e) / (x (1-x))` on the open unit interval.
pub fn entropy_d2(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain(format!(
            "entropy second derivative needs 0 < x < 1, got {x}"
        )));
    }
    Ok(-std::f64::consts::LOG2_E / (x * (1.0 - x)))
}

fn check_g_domain(k: u64, beta: f64, delta: f64) -> Result<()> {
    check_k(k)?;
    check_unit("beta", beta)?;
    if !(0.0..=beta / 2.0).contains(&delta) {
        return Err(Error::domain(format!(
            "delta must lie in [0, beta/2] = [0, {}], got {delta}",
            beta / 2.0
        )));
    }
    Ok(())
}

/// The rate function itself.
pub fn g(k: u64, beta: f64, delta: f64) -> Result<f64> {
    check_g_domain(k, beta, delta)?;
    let omd = 1.0 - delta;
    let u = if omd > 0.0 { (beta - 2.0 * delta) / omd } else { 0.0 };
    Ok((beta - 2.0 * delta) * ((k - 1) as f64).log2() - omd * (k as f64).log2()
        + 2.0 * entropy(delta)?
        + omd * entropy(u.clamp(0.0, 1.0))?)
}

/// Slope of `g` in `delta`. The open-interval endpoints are poles:
/// evaluating exactly at `delta = 0` or `delta = beta/2` returns the
/// matching signed infinity rather than an error.
pub fn dg_ddelta(k: u64, beta: f64, delta: f64) -> Result<f64> {
    check_g_domain(k, beta, delta)?;
    if delta == 0.0 {
        return Ok(f64::INFINITY);
    }
    if delta == beta / 2.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let omd = 1.0 - delta;
    let u = ((beta - 2.0 * delta) / omd).clamp(0.0, 1.0);
    Ok((k as f64).log2() - 2.0 * ((k - 1) as f64).log2() + 2.0 * entropy_d1(delta)?
        - entropy(u)?
        - (2.0 - beta) / omd * entropy_d1(u)?)
}

/// Curvature of `g` in `delta`, defined strictly inside `(0, beta/2)`.
pub fn d2g_ddelta2(k: u64, beta: f64, delta: f64) -> Result<f64> {
    check_g_domain(k, beta, delta)?;
    if delta == 0.0 || delta == beta / 2.0 {
        return Err(Error::domain(
            "second derivative is defined only strictly inside (0, beta/2)",
        ));
    }
    let omd = 1.0 - delta;
    let u = ((beta - 2.0 * delta) / omd).clamp(0.0, 1.0);
    let coef = (2.0 - beta) * (2.0 - beta) / (omd * omd * omd);
    Ok(2.0 * entropy_d2(delta)? + coef * entropy_d2(u)?)
}

/// Upper bound on `max g` over `[delta_l, delta_r]` from the crossing
/// of the tangents at the two points. Requires an interior bracket of
/// the maximum: finite slopes with `dg(delta_l) > 0 > dg(delta_r)`.
pub fn tangent_upper(k: u64, beta: f64, delta_l: f64, delta_r: f64) -> Result<f64> {
    check_g_domain(k, beta, delta_l)?;
    check_g_domain(k, beta, delta_r)?;
    if !(0.0 < delta_l && delta_l < delta_r && delta_r < beta / 2.0) {
        return Err(Error::domain(format!(
            "tangent bracket needs 0 < delta_l < delta_r < beta/2, got {delta_l}, {delta_r}"
        )));
    }
    let sl = dg_ddelta(k, beta, delta_l)?;
    let sr = dg_ddelta(k, beta, delta_r)?;
    if !(sl.is_finite() && sr.is_finite() && sl > 0.0 && sr < 0.0) {
        return Err(Error::domain(format!(
            "tangent bracket needs dg({delta_l}) > 0 > dg({delta_r}), got {sl} and {sr}"
        )));
    }
    let gl = g(k, beta, delta_l)?;
    let gr = g(k, beta, delta_r)?;
    Ok((sl * sr * (delta_l - delta_r) + sl * gr - sr * gl) / (sl - sr))
}

/// A diagnostic sample of the rate function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GEvalPoint {
    pub k: u64,
    pub beta: f64,
    pub delta: f64,
    pub g: f64,
    pub dg: f64,
}

impl GEvalPoint {
    pub fn compute(k: u64, beta: f64, delta: f64) -> Result<GEvalPoint> {
        Ok(GEvalPoint {
            k,
            beta,
            delta,
            g: g(k, beta, delta)?,
            dg: dg_ddelta(k, beta, delta)?,
        })
    }
}

/// Entropy enclosure at a zero-width point already clamped to `[0, 1]`.
/// Exact endpoints evaluate to zero; if rounding leaves a log pole
/// inside an intermediate, the result degrades to the full range
/// `[0, 1]`, which is sound but uninformative.
pub(crate) fn entropy_point_encl<C: IntervalReal>(p: &C, ctx: C::Ctx) -> C {
    let zero = C::from_u64(0, ctx);
    if p.hi_f64() <= 0.0 || p.lo_f64() >= 1.0 {
        return zero;
    }
    let one_minus = C::from_u64(1, ctx).sub(p);
    match (p.log2(), one_minus.log2()) {
        (Some(lp), Some(lq)) => zero.sub(&p.mul(&lp).add(&one_minus.mul(&lq))),
        _ => zero.hull(&C::from_u64(1, ctx)),
    }
}

/// Entropy enclosure over an interval, using unimodality: the minimum
/// sits at an endpoint, the maximum is 1 when the interval covers 1/2.
pub(crate) fn entropy_range_encl<C: IntervalReal>(x: &C, ctx: C::Ctx) -> C {
    let xc = x.clamp01();
    let ha = entropy_point_encl(&xc.lo_point(), ctx);
    let hb = entropy_point_encl(&xc.hi_point(), ctx);
    let mut out = ha.hull(&hb);
    if xc.contains_half() {
        out = out.hull(&C::from_u64(1, ctx));
    }
    out.clamp01()
}

/// Interval evaluator for the rate function at a fixed `k` and `beta`.
/// Probe coordinates stay exact doubles; every derived quantity is an
/// enclosure, so a resolved sign is trustworthy in either backend.
pub(crate) struct GEval<C: IntervalReal> {
    ctx: C::Ctx,
    pub beta: f64,
    log2_k: C,
    log2_km1: C,
}

impl<C: IntervalReal> GEval<C> {
    pub fn new(k: u64, beta: f64, ctx: C::Ctx) -> Result<GEval<C>> {
        check_k(k)?;
        check_unit("beta", beta)?;
        let log2_k = C::from_u64(k, ctx)
            .log2()
            .ok_or_else(|| Error::domain("log2 k"))?;
        let log2_km1 = C::from_u64(k - 1, ctx)
            .log2()
            .ok_or_else(|| Error::domain("log2 (k-1)"))?;
        Ok(GEval { ctx, beta, log2_k, log2_km1 })
    }

    pub fn point(&self, v: f64) -> C {
        C::from_f64(v, self.ctx)
    }

    fn uint(&self, v: u64) -> C {
        C::from_u64(v, self.ctx)
    }

    /// `H'` at a zero-width point strictly inside the unit interval.
    fn entropy_d1_point(&self, p: &C) -> Option<C> {
        let ratio = self.uint(1).sub(p).div(p)?;
        ratio.log2()
    }

    /// Enclosure of `g(beta, delta)`.
    pub fn g_at(&self, delta: f64) -> Option<C> {
        let d = self.point(delta).clamp01();
        let omd = self.uint(1).sub(&d);
        let bm2d = self.point(self.beta).sub(&d.add(&d));
        let u = bm2d.div(&omd)?.clamp01();
        let h_d = entropy_range_encl(&d, self.ctx);
        let h_u = entropy_range_encl(&u, self.ctx);
        Some(
            bm2d.mul(&self.log2_km1)
                .sub(&omd.mul(&self.log2_k))
                .add(&h_d.add(&h_d))
                .add(&omd.mul(&h_u)),
        )
    }

    /// Enclosure of the slope at a point strictly inside `(0, beta/2)`;
    /// `None` when a pole cannot be excluded at this precision.
    pub fn dg_at(&self, delta: f64) -> Option<C> {
        if !(delta > 0.0 && delta < self.beta / 2.0) {
            return None;
        }
        let d = self.point(delta);
        let omd = self.uint(1).sub(&d);
        let bm2d = self.point(self.beta).sub(&d.add(&d));
        let u = bm2d.div(&omd)?.clamp01();
        let hp_d = self.entropy_d1_point(&d)?;
        let hp_u = self.entropy_d1_point(&u)?;
        let h_u = entropy_range_encl(&u, self.ctx);
        let coef = self.uint(2).sub(&self.point(self.beta)).div(&omd)?;
        Some(
            self.log2_k
                .sub(&self.log2_km1.add(&self.log2_km1))
                .add(&hp_d.add(&hp_d))
                .sub(&h_u)
                .sub(&coef.mul(&hp_u)),
        )
    }

    /// Tangent-crossing upper bound for the maximum, from certified
    /// endpoint evaluations.
    pub fn tangent_y(&self, dl: f64, dr: f64, sl: &C, sr: &C, gl: &C, gr: &C) -> Option<C> {
        let dd = self.point(dl).sub(&self.point(dr));
        let num = sl.mul(sr).mul(&dd).add(&sl.mul(gr)).sub(&sr.mul(gl));
        num.div(&sl.sub(sr))
    }
}
