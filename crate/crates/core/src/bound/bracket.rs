//! Certified sign tests and threshold location for the rate function.
//!
//! Everything here reduces to one question: for a given `beta`, is
//! `max g(beta, .)` over the deletion fraction negative or positive?
//! The maximum sits strictly inside `(0, beta/2)` because the slope
//! runs from `+inf` down to `-inf`, and `g` is strictly concave there
//! (both curvature terms are negative multiples of `H''`). Concavity
//! yields two one-sided certificates:
//!
//! * a point evaluation whose enclosure stays above zero proves the
//!   maximum positive;
//! * at a pair of points with certified ascending and descending
//!   slope, the crossing of the two tangent lines lies above the
//!   maximum, so an enclosure of the crossing height that stays below
//!   zero proves it negative.
//!
//! [`sign_g`] pursues both at once: it hunts for a slope bracket by
//! approaching the domain ends where the slope diverges, then shrinks
//! it with midpoint probes, falling back to the trisection points when
//! a midpoint slope cannot be signed at the working precision.
//! [`g_bracket`] runs the same engine until the gap between the best
//! certified lower and upper bounds on the maximum closes below a
//! requested width. [`beta_star`] wraps the sign test in a bisection
//! over `beta`, again with a trisection fallback, and reports through
//! [`BracketStatus`] when the evaluation budget ran out before the
//! requested width was reached.

use super::gfun::GEval;
use super::hiprec::DyadicInterval;
use super::interval::{F64Interval, IntervalReal};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default number of interval evaluations a single sign test may spend.
pub const DEFAULT_SIGN_BUDGET: u32 = 64;

/// Evaluations allowed before a width-driven bracket run gives up.
const BRACKET_EVAL_BUDGET: u32 = 4096;

/// Deepest endpoint-approach step attempted while hunting for
/// certified slope signs.
const MAX_SCAN_DEPTH: u32 = 64;

/// Arithmetic backend for the certified evaluations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    /// Outward-rounded double intervals. Enclosure widths bottom out
    /// around `1e-12`, which covers every tabulated threshold.
    #[default]
    Double,
    /// Dyadic intervals with the given working precision in bits.
    /// Values below 8 are raised to 8.
    Bits(u32),
}

/// Certified sign of `max g(beta, .)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GSign {
    Negative,
    Positive,
    /// Neither certificate fired within the budget at the working
    /// precision. Never a guess in disguise: the true sign is simply
    /// not established.
    Inconclusive,
}

/// Whether a bracketing run reached the width it was asked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketStatus {
    Certified,
    BudgetExhausted,
}

/// Enclosure of the threshold in `beta` where the maximum of the rate
/// function turns positive.
///
/// The invariant holds at every step of the run: the maximum is
/// certified negative at `lower` and certified positive at `upper`, so
/// the threshold lies strictly between them and `lower` is always safe
/// to publish as the bound itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaBracket {
    pub lower: f64,
    pub upper: f64,
    /// Interval evaluations spent across every sign test of the run.
    pub sign_evals: u64,
    pub status: BracketStatus,
}

impl BetaBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

struct Endpoint<C> {
    delta: f64,
    g: C,
    dg: C,
}

/// State of one certification run at fixed `k` and `beta`.
///
/// `left` and `right` hold the innermost probes with certified
/// ascending and descending slope; concavity places the maximum
/// between them and makes the tangent crossing built from their data
/// an upper bound on it. Every probe also feeds the best certified
/// lower bound, so a positive maximum can be recognised before any
/// slope is.
struct Refiner<C: IntervalReal> {
    eval: GEval<C>,
    left: Option<Endpoint<C>>,
    right: Option<Endpoint<C>>,
    best_lower: f64,
    best_upper: f64,
    evals: u32,
    budget: u32,
}

enum Round {
    Moved,
    Stalled,
    Exhausted,
}

impl<C: IntervalReal> Refiner<C> {
    fn new(k: u64, beta: f64, budget: u32, ctx: C::Ctx) -> Result<Refiner<C>> {
        Ok(Refiner {
            eval: GEval::new(k, beta, ctx)?,
            left: None,
            right: None,
            best_lower: f64::NEG_INFINITY,
            best_upper: f64::INFINITY,
            evals: 0,
            budget,
        })
    }

    /// Evaluate the function and its slope at one point, folding the
    /// results into the certificates. Returns `false` once the budget
    /// is spent.
    fn probe(&mut self, delta: f64) -> bool {
        if self.evals >= self.budget {
            return false;
        }
        self.evals += 1;
        let Some(gv) = self.eval.g_at(delta) else {
            return true;
        };
        self.best_lower = self.best_lower.max(gv.lo_f64());
        match self.eval.dg_at(delta) {
            Some(s)
                if s.strictly_positive()
                    && self.left.as_ref().is_none_or(|e| delta > e.delta) =>
            {
                self.left = Some(Endpoint { delta, g: gv, dg: s });
                self.update_tangent();
            }
            Some(s)
                if s.strictly_negative()
                    && self.right.as_ref().is_none_or(|e| delta < e.delta) =>
            {
                self.right = Some(Endpoint { delta, g: gv, dg: s });
                self.update_tangent();
            }
            _ => {}
        }
        true
    }

    fn update_tangent(&mut self) {
        if let (Some(l), Some(r)) = (&self.left, &self.right) {
            if let Some(y) = self.eval.tangent_y(l.delta, r.delta, &l.dg, &r.dg, &l.g, &r.g) {
                self.best_upper = self.best_upper.min(y.hi_f64());
            }
        }
    }

    fn bracketed(&self) -> bool {
        self.left.is_some() && self.right.is_some()
    }

    fn verdict(&self) -> GSign {
        debug_assert!(self.best_lower <= self.best_upper);
        if self.best_lower > 0.0 {
            GSign::Positive
        } else if self.best_upper < 0.0 {
            GSign::Negative
        } else {
            GSign::Inconclusive
        }
    }

    /// Hunt for certified slope signs: the domain midpoint first, then
    /// sequences approaching each end, where the slope diverges and
    /// signing gets easier.
    fn establish(&mut self) {
        let half = self.eval.beta / 2.0;
        if half <= 0.0 || !self.probe(0.5 * half) {
            return;
        }
        for j in 2..=MAX_SCAN_DEPTH {
            if self.bracketed() {
                return;
            }
            let step = half * 0.5f64.powi(j as i32);
            if self.left.is_none() && !self.probe(step) {
                return;
            }
            if self.right.is_none() && !self.probe(half - step) {
                return;
            }
        }
    }

    /// One shrink attempt on the slope bracket: the midpoint first, the
    /// two trisection points when its slope cannot be signed. A stalled
    /// round would re-probe the same coordinates forever, so the caller
    /// treats it as terminal for the working precision.
    fn refine_round(&mut self) -> Round {
        let (a, b) = match (&self.left, &self.right) {
            (Some(l), Some(r)) => (l.delta, r.delta),
            _ => return Round::Stalled,
        };
        let third = (b - a) / 3.0;
        for cand in [0.5 * (a + b), a + third, b - third] {
            if !(cand > a && cand < b) {
                continue;
            }
            if !self.probe(cand) {
                return Round::Exhausted;
            }
            let moved = match (&self.left, &self.right) {
                (Some(l), Some(r)) => l.delta > a || r.delta < b,
                _ => false,
            };
            if moved {
                return Round::Moved;
            }
        }
        Round::Stalled
    }
}

fn drive_sign<C: IntervalReal>(
    k: u64,
    beta: f64,
    budget: u32,
    ctx: C::Ctx,
) -> Result<(GSign, u32)> {
    if beta == 0.0 {
        let eval: GEval<C> = GEval::new(k, beta, ctx)?;
        let sign = match eval.g_at(0.0) {
            Some(gv) if gv.hi_f64() < 0.0 => GSign::Negative,
            Some(gv) if gv.lo_f64() > 0.0 => GSign::Positive,
            _ => GSign::Inconclusive,
        };
        return Ok((sign, 1));
    }
    let mut refiner = Refiner::<C>::new(k, beta, budget, ctx)?;
    refiner.establish();
    loop {
        let verdict = refiner.verdict();
        if verdict != GSign::Inconclusive {
            return Ok((verdict, refiner.evals));
        }
        if !refiner.bracketed() {
            return Ok((GSign::Inconclusive, refiner.evals));
        }
        match refiner.refine_round() {
            Round::Moved => {}
            Round::Stalled | Round::Exhausted => return Ok((refiner.verdict(), refiner.evals)),
        }
    }
}

fn drive_bracket<C: IntervalReal>(k: u64, beta: f64, eps: f64, ctx: C::Ctx) -> Result<(f64, f64)> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::domain(format!(
            "bracket width must be positive, got {eps}"
        )));
    }
    if beta == 0.0 {
        let eval: GEval<C> = GEval::new(k, beta, ctx)?;
        let gv = eval
            .g_at(0.0)
            .ok_or_else(|| Error::PrecisionFloor("cannot enclose g at beta = 0".into()))?;
        let (lo, hi) = (gv.lo_f64(), gv.hi_f64());
        if hi - lo <= eps {
            return Ok((lo, hi));
        }
        return Err(Error::PrecisionFloor(format!(
            "point enclosure at beta = 0 has width {:.3e}, requested {eps:.3e}",
            hi - lo
        )));
    }
    let mut refiner = Refiner::<C>::new(k, beta, BRACKET_EVAL_BUDGET, ctx)?;
    refiner.establish();
    loop {
        let gap = refiner.best_upper - refiner.best_lower;
        if gap <= eps {
            return Ok((refiner.best_lower, refiner.best_upper));
        }
        if !refiner.bracketed() {
            return Err(Error::PrecisionFloor(format!(
                "no certified slope bracket for k = {k}, beta = {beta} at this precision"
            )));
        }
        match refiner.refine_round() {
            Round::Moved => {}
            Round::Stalled => {
                return Err(Error::PrecisionFloor(format!(
                    "bracket stalled at width {gap:.3e} (requested {eps:.3e}); raise the precision"
                )));
            }
            Round::Exhausted => {
                return Err(Error::PrecisionFloor(format!(
                    "evaluation budget spent at width {gap:.3e} (requested {eps:.3e})"
                )));
            }
        }
    }
}

fn signed<C: IntervalReal>(
    k: u64,
    beta: f64,
    budget: u32,
    ctx: C::Ctx,
    evals: &mut u64,
) -> Result<GSign> {
    let (sign, spent) = drive_sign::<C>(k, beta, budget, ctx)?;
    *evals += u64::from(spent);
    Ok(sign)
}

fn drive_beta_star<C: IntervalReal>(
    k: u64,
    eps: f64,
    budget: u32,
    ctx: C::Ctx,
) -> Result<(BetaBracket, Vec<(f64, f64)>)> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::domain(format!(
            "bracket width must be positive, got {eps}"
        )));
    }
    let mut evals = 0u64;
    match signed::<C>(k, 0.0, budget, ctx, &mut evals)? {
        GSign::Negative => {}
        other => {
            return Err(Error::PrecisionFloor(format!(
                "could not certify g < 0 at beta = 0 for k = {k} (got {other:?})"
            )))
        }
    }
    match signed::<C>(k, 1.0, budget, ctx, &mut evals)? {
        GSign::Positive => {}
        other => {
            return Err(Error::PrecisionFloor(format!(
                "could not certify g > 0 at beta = 1 for k = {k} (got {other:?}); raise the budget"
            )))
        }
    }
    let (mut lower, mut upper) = (0.0f64, 1.0f64);
    let mut trace = vec![(lower, upper)];
    let mut status = BracketStatus::Certified;
    while upper - lower > eps {
        let mid = 0.5 * (lower + upper);
        if !(mid > lower && mid < upper) {
            status = BracketStatus::BudgetExhausted;
            break;
        }
        let mut moved = true;
        match signed::<C>(k, mid, budget, ctx, &mut evals)? {
            GSign::Negative => lower = mid,
            GSign::Positive => upper = mid,
            GSign::Inconclusive => {
                moved = false;
                let third = (upper - lower) / 3.0;
                for cand in [lower + third, upper - third] {
                    if !(cand > lower && cand < upper) {
                        continue;
                    }
                    match signed::<C>(k, cand, budget, ctx, &mut evals)? {
                        GSign::Negative => {
                            lower = cand;
                            moved = true;
                        }
                        GSign::Positive => {
                            upper = cand;
                            moved = true;
                        }
                        GSign::Inconclusive => {}
                    }
                    if moved {
                        break;
                    }
                }
            }
        }
        if !moved {
            status = BracketStatus::BudgetExhausted;
            break;
        }
        trace.push((lower, upper));
    }
    Ok((
        BetaBracket { lower, upper, sign_evals: evals, status },
        trace,
    ))
}

fn working_bits(bits: u32) -> u32 {
    bits.max(8)
}

/// Certified sign of the maximum of the rate function over its
/// deletion-fraction domain, in double-interval arithmetic.
///
/// `budget` caps the number of interval evaluations (one probe of the
/// function and its slope per unit). When it runs out before either
/// certificate fires, the answer is [`GSign::Inconclusive`].
pub fn sign_g(k: u64, beta: f64, budget: u32) -> Result<GSign> {
    sign_g_with(k, beta, budget, Precision::Double)
}

/// [`sign_g`] with an explicit arithmetic backend.
pub fn sign_g_with(k: u64, beta: f64, budget: u32, precision: Precision) -> Result<GSign> {
    match precision {
        Precision::Double => Ok(drive_sign::<F64Interval>(k, beta, budget, ())?.0),
        Precision::Bits(bits) => {
            Ok(drive_sign::<DyadicInterval>(k, beta, budget, working_bits(bits))?.0)
        }
    }
}

/// Two-sided enclosure of `max g(beta, .)` of width at most `eps`.
///
/// The lower side is the best certified point evaluation, the upper
/// side the best tangent crossing; the engine shrinks the slope
/// bracket until the gap closes. When the arithmetic cannot close it,
/// the run fails with [`Error::PrecisionFloor`] rather than returning
/// a pair wider than asked for. At `beta = 0` the domain is a single
/// point and the enclosure collapses onto `-log2 k`.
pub fn g_bracket(k: u64, beta: f64, eps: f64) -> Result<(f64, f64)> {
    g_bracket_with(k, beta, eps, Precision::Double)
}

/// [`g_bracket`] with an explicit arithmetic backend.
pub fn g_bracket_with(k: u64, beta: f64, eps: f64, precision: Precision) -> Result<(f64, f64)> {
    match precision {
        Precision::Double => drive_bracket::<F64Interval>(k, beta, eps, ()),
        Precision::Bits(bits) => drive_bracket::<DyadicInterval>(k, beta, eps, working_bits(bits)),
    }
}

/// Certified enclosure of the threshold ratio at which the maximum of
/// the rate function turns positive.
///
/// Bisection on `beta` over `[0, 1]` with both unit endpoints
/// sign-certified up front. Each inner sign test gets `budget`
/// evaluations of its own; a midpoint it cannot sign sends the two
/// trisection points in as substitutes, and when those are
/// inconclusive too the run stops with
/// [`BracketStatus::BudgetExhausted`] and the best bracket found. The
/// bracket always contains the threshold; quote `lower` as the safe
/// published bound.
pub fn beta_star(k: u64, eps: f64, budget: u32) -> Result<BetaBracket> {
    beta_star_with(k, eps, budget, Precision::Double)
}

/// [`beta_star`] with an explicit arithmetic backend.
pub fn beta_star_with(k: u64, eps: f64, budget: u32, precision: Precision) -> Result<BetaBracket> {
    Ok(beta_star_traced(k, eps, budget, precision)?.0)
}

/// [`beta_star`] keeping the `(lower, upper)` pair after every shrink,
/// the first entry being the initial unit interval.
pub fn beta_star_traced(
    k: u64,
    eps: f64,
    budget: u32,
    precision: Precision,
) -> Result<(BetaBracket, Vec<(f64, f64)>)> {
    match precision {
        Precision::Double => drive_beta_star::<F64Interval>(k, eps, budget, ()),
        Precision::Bits(bits) => drive_beta_star::<DyadicInterval>(k, eps, budget, working_bits(bits)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BETA2: f64 = 0.170551990419;
    const BETA3: f64 = 0.283660908033;
    const BETA8: f64 = 0.51990176097;
    const BETA40: f64 = 0.999984321127;

    #[test]
    fn sign_certificates_at_reference_points() {
        assert_eq!(sign_g(2, 0.0, 4).unwrap(), GSign::Negative);
        assert_eq!(sign_g(4, 0.0, 4).unwrap(), GSign::Negative);
        assert_eq!(sign_g(2, 0.1, 64).unwrap(), GSign::Negative);
        assert_eq!(sign_g(2, 0.17, 64).unwrap(), GSign::Negative);
        assert_eq!(sign_g(2, 0.1706, 64).unwrap(), GSign::Positive);
        assert_eq!(sign_g(2, 1.0, 64).unwrap(), GSign::Positive);
    }

    #[test]
    fn sign_resolves_tight_neighbourhoods_of_the_threshold() {
        assert_eq!(sign_g(2, 0.170551, 64).unwrap(), GSign::Negative);
        assert_eq!(sign_g(2, 0.170552, 64).unwrap(), GSign::Positive);
        assert_eq!(sign_g(3, 0.283660, 64).unwrap(), GSign::Negative);
        assert_eq!(sign_g(3, 0.283661, 64).unwrap(), GSign::Positive);
        assert_eq!(sign_g(4, 0.359783, 64).unwrap(), GSign::Negative);
        assert_eq!(sign_g(8, 0.519901, 64).unwrap(), GSign::Negative);
        assert_eq!(sign_g(8, 0.519902, 64).unwrap(), GSign::Positive);
    }

    #[test]
    fn starved_sign_tests_admit_it() {
        assert_eq!(sign_g(2, 0.17, 0).unwrap(), GSign::Inconclusive);
        assert_eq!(sign_g(2, 0.170552, 1).unwrap(), GSign::Inconclusive);
    }

    #[test]
    fn domain_violations_are_rejected() {
        assert!(sign_g(1, 0.5, 8).is_err());
        assert!(sign_g(2, -0.1, 8).is_err());
        assert!(sign_g(2, 1.5, 8).is_err());
        assert!(g_bracket(2, 0.5, 0.0).is_err());
        assert!(beta_star(2, -1.0, 8).is_err());
    }

    #[test]
    fn g_bracket_reference_values() {
        let (lo, hi) = g_bracket(2, 0.1, 1e-9).unwrap();
        assert!(hi - lo <= 1e-9);
        assert!(lo <= -0.333787345292 && -0.333787345292 <= hi);
        let (lo, hi) = g_bracket(2, 0.17, 1e-9).unwrap();
        assert!(lo <= -0.00240286837874 && -0.00240286837874 <= hi);
        let (lo, hi) = g_bracket(2, 0.0, 1e-9).unwrap();
        assert!(lo <= -1.0 && -1.0 <= hi);
        assert!(hi - lo < 1e-12);
    }

    #[test]
    fn g_bracket_below_the_double_floor_fails_loudly() {
        match g_bracket(2, 0.17, 1e-30) {
            Err(Error::PrecisionFloor(_)) => {}
            other => panic!("expected a precision floor, got {other:?}"),
        }
    }

    #[test]
    fn beta_star_encloses_known_thresholds() {
        for (k, reference) in [(2u64, BETA2), (8, BETA8), (1 << 40, BETA40)] {
            let bracket = beta_star(k, 1e-6, DEFAULT_SIGN_BUDGET).unwrap();
            assert_eq!(bracket.status, BracketStatus::Certified, "k = {k}");
            assert!(bracket.width() <= 1e-6);
            assert!(
                bracket.lower < reference && reference < bracket.upper,
                "k = {k}: {reference} outside [{}, {}]",
                bracket.lower,
                bracket.upper
            );
        }
    }

    #[test]
    fn beta_star_trace_is_a_nested_shrinking_chain() {
        let (bracket, trace) =
            beta_star_traced(3, 1e-4, DEFAULT_SIGN_BUDGET, Precision::Double).unwrap();
        assert_eq!(trace[0], (0.0, 1.0));
        for pair in trace.windows(2) {
            let (al, ah) = pair[0];
            let (bl, bh) = pair[1];
            assert!(bl >= al && bh <= ah);
            assert!(bh - bl <= (ah - al) * (2.0 / 3.0) + 1e-12);
        }
        let last = *trace.last().unwrap();
        assert_eq!(last, (bracket.lower, bracket.upper));
        assert!(bracket.lower < BETA3 && BETA3 < bracket.upper);
    }

    #[test]
    fn exhausted_budgets_still_return_a_valid_bracket() {
        let bracket = beta_star(2, 1e-9, 2).unwrap();
        assert_eq!(bracket.status, BracketStatus::BudgetExhausted);
        assert!(bracket.width() > 1e-9);
        assert!(bracket.lower < BETA2 && BETA2 < bracket.upper);
    }

    #[test]
    fn dyadic_backend_reproduces_double_results() {
        assert_eq!(
            sign_g_with(2, 0.170552, 64, Precision::Bits(96)).unwrap(),
            GSign::Positive
        );
        assert_eq!(
            sign_g_with(2, 0.170551, 64, Precision::Bits(96)).unwrap(),
            GSign::Negative
        );
        let (lo, hi) = g_bracket_with(2, 0.17, 1e-12, Precision::Bits(128)).unwrap();
        assert!(hi - lo <= 1e-12);
        assert!(lo <= -0.00240286837874 && -0.00240286837874 <= hi);
        let bracket = beta_star_with(2, 1e-4, DEFAULT_SIGN_BUDGET, Precision::Bits(64)).unwrap();
        assert_eq!(bracket.status, BracketStatus::Certified);
        assert!(bracket.lower < BETA2 && BETA2 < bracket.upper);
    }
}
