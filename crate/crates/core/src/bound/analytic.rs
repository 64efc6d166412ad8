//! Closed-form fallback bound through the entropy-sum constant.
//!
//! The rate function splits into an alphabet part and a purely
//! entropic part `phi(beta, delta) = 2 H(delta) + (1-delta) H(u)` with
//! `u = (beta - 2 delta)/(1 - delta)`. Once the maximum `M` of `phi`
//! over the whole admissible set is certified, every alphabet size
//! gets the threshold bound `1 - M / log2(k-1)` for free, no root
//! finding involved. `M` is located by branch and bound on `(beta,
//! delta)` boxes: interval evaluation bounds `phi` above on each box,
//! feasible center points push the certified lower bound up, and boxes
//! that cannot beat it are dropped.

use super::gfun::entropy_range_encl;
use super::interval::{F64Interval, IntervalReal};
use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

/// Bracket width the branch and bound drives the constant to.
const M_GAP_TARGET: f64 = 5e-5;

/// Box splits allowed before giving up on the target width.
const MAX_SPLITS: u32 = 1_000_000;

type I = F64Interval;

fn span(a: f64, b: f64) -> I {
    I::from_f64(a, ()).hull(&I::from_f64(b, ()))
}

#[derive(Clone, Copy)]
struct Region {
    beta_lo: f64,
    beta_hi: f64,
    delta_lo: f64,
    delta_hi: f64,
}

impl Region {
    fn split(self) -> [Region; 2] {
        if self.beta_hi - self.beta_lo >= 2.0 * (self.delta_hi - self.delta_lo) {
            let mid = 0.5 * (self.beta_lo + self.beta_hi);
            [
                Region { beta_hi: mid, ..self },
                Region { beta_lo: mid, ..self },
            ]
        } else {
            let mid = 0.5 * (self.delta_lo + self.delta_hi);
            [
                Region { delta_hi: mid, ..self },
                Region { delta_lo: mid, ..self },
            ]
        }
    }
}

/// Upper bound on `phi` over the feasible part of a box. The fraction
/// is clamped into `[0, 1]`, which absorbs the infeasible corners: the
/// clamped extension never exceeds 2 there, well below the maximum.
fn phi_over(region: &Region) -> f64 {
    let delta = span(region.delta_lo, region.delta_hi).clamp01();
    let num = span(region.beta_lo, region.beta_hi)
        .sub(&delta.add(&delta))
        .clamp01();
    let den = I::from_u64(1, ()).sub(&delta);
    let u = match num.div(&den) {
        Some(u) => u.clamp01(),
        None => span(0.0, 1.0),
    };
    let h_d = entropy_range_encl(&delta, ());
    let h_u = entropy_range_encl(&u, ());
    h_d.add(&h_d).add(&den.mul(&h_u)).hi_f64()
}

/// Certified value of `phi` from below at one feasible point.
fn phi_at(beta: f64, delta: f64) -> f64 {
    let b = I::from_f64(beta, ());
    let d = I::from_f64(delta, ());
    let num = b.sub(&d.add(&d)).clamp01();
    let den = I::from_u64(1, ()).sub(&d);
    let u = match num.div(&den) {
        Some(u) => u.clamp01(),
        None => return f64::NEG_INFINITY,
    };
    let h_d = entropy_range_encl(&d, ());
    let h_u = entropy_range_encl(&u, ());
    h_d.add(&h_d).add(&den.mul(&h_u)).lo_f64()
}

struct Candidate {
    hi: f64,
    region: Region,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.hi.total_cmp(&other.hi)
    }
}

fn compute_m_bracket() -> Result<(f64, f64)> {
    let root = Region {
        beta_lo: 0.0,
        beta_hi: 1.0,
        delta_lo: 0.0,
        delta_hi: 0.5,
    };
    let mut best_lo = phi_at(1.0, 0.363);
    let mut heap = BinaryHeap::new();
    heap.push(Candidate { hi: phi_over(&root), region: root });
    let mut splits = 0u32;
    while let Some(top) = heap.pop() {
        let upper = top.hi.max(best_lo);
        if upper - best_lo <= M_GAP_TARGET {
            return Ok((best_lo, upper));
        }
        splits += 1;
        if splits > MAX_SPLITS {
            return Err(Error::PrecisionFloor(format!(
                "entropy-sum maximum still wider than {M_GAP_TARGET:.1e} after {MAX_SPLITS} splits"
            )));
        }
        for child in top.region.split() {
            if child.beta_hi / 2.0 < child.delta_lo {
                continue;
            }
            let hi = phi_over(&child);
            let center_beta = 0.5 * (child.beta_lo + child.beta_hi);
            let center_delta = (0.5 * (child.delta_lo + child.delta_hi)).min(center_beta / 2.0);
            best_lo = best_lo.max(phi_at(center_beta, center_delta));
            if hi > best_lo {
                heap.push(Candidate { hi, region: child });
            }
        }
    }
    Ok((best_lo, best_lo))
}

/// Certified bracket for the maximum `M` of the entropy sum, computed
/// once per process and cached.
pub fn m_constant_bracket() -> Result<(f64, f64)> {
    static CACHE: OnceLock<(f64, f64)> = OnceLock::new();
    if let Some(v) = CACHE.get() {
        return Ok(*v);
    }
    let fresh = compute_m_bracket()?;
    Ok(*CACHE.get_or_init(|| fresh))
}

/// Closed-form threshold bound `1 - M / log2(k-1)`, rounded so the
/// result never overstates it. Negative for small alphabets; needs
/// `k >= 3` so the logarithm in the denominator is positive.
pub fn beta_hat_analytic(k: u64) -> Result<f64> {
    if k < 3 {
        return Err(Error::domain(format!(
            "the closed-form bound needs k >= 3, got {k}"
        )));
    }
    let (m_lo, m_hi) = m_constant_bracket()?;
    let m = span(m_lo, m_hi);
    let log2_km1 = I::from_u64(k - 1, ())
        .log2()
        .ok_or_else(|| Error::domain("log2(k-1) out of range"))?;
    let ratio = m
        .div(&log2_km1)
        .ok_or_else(|| Error::domain("log2(k-1) must be positive"))?;
    Ok(I::from_u64(1, ()).sub(&ratio).lo_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    const M_REFERENCE: f64 = 2.5182912797431344;

    #[test]
    fn m_bracket_is_tight_and_encloses_the_maximum() {
        let (lo, hi) = m_constant_bracket().unwrap();
        assert!(hi - lo <= 1e-4, "width {}", hi - lo);
        assert!(lo <= M_REFERENCE && M_REFERENCE <= hi);
        assert_eq!((lo * 100.0).round(), 252.0);
        assert_eq!((hi * 100.0).round(), 252.0);
    }

    #[test]
    fn closed_form_bound_matches_reference_values() {
        let expected = [
            (7u64, 0.025791949),
            (8, 0.1029665469),
            (16, 0.3554231381),
            (32, 0.4916852054),
            (1 << 10, 0.7481353699),
            (1 << 20, 0.8740854274),
        ];
        for (k, want) in expected {
            let got = beta_hat_analytic(k).unwrap();
            assert!(got <= want + 1e-9, "k = {k}: {got} above {want}");
            assert!(want - got < 1e-4, "k = {k}: {got} too far below {want}");
        }
    }

    #[test]
    fn closed_form_bound_shape() {
        assert!(beta_hat_analytic(2).is_err());
        assert!(beta_hat_analytic(1).is_err());
        assert!(beta_hat_analytic(3).unwrap() < 0.0);
        assert!(beta_hat_analytic(7).unwrap() >= 0.0);
        let mut prev = f64::NEG_INFINITY;
        for k in [3u64, 4, 5, 6, 7, 8, 16, 32, 1 << 10, 1 << 20] {
            let val = beta_hat_analytic(k).unwrap();
            assert!(val > prev, "k = {k}");
            assert!(val < 1.0);
            prev = val;
        }
    }
}
