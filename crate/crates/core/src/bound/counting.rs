//! Exact combinatorial bounds on edit balls.
//!
//! Every string within edit distance `r` of `x` is produced by some
//! script that deletes, substitutes and inserts at pairwise distinct
//! positions, taken in canonical order. Counting those scripts instead
//! of the strings themselves overshoots the ball size but collapses
//! into short sums of binomial products that stay exact in
//! arbitrary-precision integers. The bound feeds two consumers: a
//! per-radius floor on every string's eccentricity, and the
//! exponential form whose rate function drives the certified threshold
//! machinery in the sibling modules.

use super::gfun;
use super::interval::bump_down;
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive, Zero};

fn check_k(k: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::AlphabetTooSmall(k));
    }
    Ok(())
}

fn choose(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    binomial(BigUint::from(n), BigUint::from(r))
}

/// Number of canonical simple scripts of cost `r` against a length-`n`
/// string: `d` deletions and `r - 2d` substitutions on distinct
/// positions, matching insertions in the gaps, and a free symbol
/// choice for every edit, summed over `d`.
pub fn css_count(k: u64, n: u64, r: u64) -> Result<BigUint> {
    check_k(k)?;
    if r > n {
        return Err(Error::domain(format!(
            "script cost must satisfy r <= n, got r = {r} with n = {n}"
        )));
    }
    let km1 = BigUint::from(k - 1);
    let kk = BigUint::from(k);
    let mut total = BigUint::zero();
    for d in 0..=r / 2 {
        let rem = r - 2 * d;
        if rem > n - d {
            continue;
        }
        let c = choose(n, d);
        total += &c * &c * choose(n - d, rem) * Pow::pow(&km1, rem) * Pow::pow(&kk, d);
    }
    Ok(total)
}

/// Upper bound on the size of the radius-`r` edit ball around any
/// length-`n` string over `k` symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallBound {
    pub k: u64,
    pub n: u64,
    pub r: u64,
    pub u: BigUint,
}

/// The ball-size bound itself: scripts of cost `r` and `r - 1` cover
/// every string in the ball, with one extra insertion slot absorbing
/// the parity difference.
pub fn ball_upper_bound(k: u64, n: u64, r: u64) -> Result<BallBound> {
    check_k(k)?;
    if r < 1 || r > n {
        return Err(Error::domain(format!(
            "ball radius must satisfy 1 <= r <= n, got r = {r} with n = {n}"
        )));
    }
    let km1 = BigUint::from(k - 1);
    let kk = BigUint::from(k);
    let mut u = BigUint::zero();
    for d in 0..=r / 2 {
        let rem = r - 2 * d;
        let c = choose(n, d);
        u += &c * &c * choose(n - d + 1, rem) * Pow::pow(&km1, rem) * Pow::pow(&kk, d);
    }
    Ok(BallBound { k, n, r, u })
}

/// Floor on the eccentricity of every length-`n` string: the strings
/// outside the radius-`r_star` ball, at least `k^n - u` of them, each
/// contribute more than `r_star` to the distance sum. Returns
/// `r_star (1 - k^-n u)` clamped below at 0, rounded so the result
/// never overstates the floor.
pub fn ecc_lower_bound(k: u64, n: u64, r_star: u64) -> Result<f64> {
    check_k(k)?;
    if r_star > n {
        return Err(Error::domain(format!(
            "shell radius must satisfy r_star <= n, got r_star = {r_star} with n = {n}"
        )));
    }
    if r_star == 0 {
        return Ok(0.0);
    }
    let u = ball_upper_bound(k, n, r_star)?.u;
    let kn = Pow::pow(&BigUint::from(k), n);
    if u >= kn {
        return Ok(0.0);
    }
    let outside = BigRational::new((&kn - &u).into(), kn.into());
    let value = (BigRational::from_integer(r_star.into()) * outside)
        .to_f64()
        .unwrap_or(0.0);
    Ok(bump_down(value).max(0.0))
}

/// Right-hand side of the exponential form of the ball bound,
/// `(n+1) * sum over d of 2^(n g(beta, d/n))`, an upper bound on the
/// normalised ball size `k^-n u` that stays computable at any `n`.
pub fn exponential_bound_rhs(k: u64, beta: f64, n: u64) -> Result<f64> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::domain("exponential bound needs n >= 1"));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::domain(format!(
            "beta must lie in [0, 1], got {beta}"
        )));
    }
    let dmax = (beta * n as f64 / 2.0).floor() as u64;
    let mut sum = 0.0f64;
    for d in 0..=dmax {
        let delta = (d as f64 / n as f64).min(beta / 2.0);
        sum += (n as f64 * gfun::g(k, beta, delta)?).exp2();
    }
    Ok((n as f64 + 1.0) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn counts(k: u64, n: u64) -> Vec<u64> {
        (0..=n)
            .map(|r| {
                css_count(k, n, r)
                    .unwrap()
                    .to_u64()
                    .expect("small test value")
            })
            .collect()
    }

    #[test]
    fn script_counts_match_hand_enumeration() {
        assert_eq!(counts(2, 1), vec![1, 1]);
        assert_eq!(counts(2, 2), vec![1, 2, 9]);
        assert_eq!(counts(2, 3), vec![1, 3, 21, 37]);
        assert_eq!(counts(2, 4), vec![1, 4, 38, 100, 241]);
        assert_eq!(counts(3, 1), vec![1, 2]);
        assert_eq!(counts(3, 2), vec![1, 4, 16]);
        assert_eq!(counts(3, 3), vec![1, 6, 39, 116]);
    }

    #[test]
    fn script_count_rejects_bad_domains() {
        assert!(css_count(1, 3, 1).is_err());
        assert!(css_count(2, 3, 4).is_err());
    }

    #[test]
    fn ball_bound_reference_values() {
        let expected = [5u64, 42, 138, 341];
        for (r, want) in (1..=4).zip(expected) {
            let bound = ball_upper_bound(2, 4, r).unwrap();
            assert_eq!(bound.u, BigUint::from(want), "r = {r}");
        }
        assert_eq!(ball_upper_bound(2, 7, 1).unwrap().u, BigUint::from(8u32));
        assert_eq!(ball_upper_bound(5, 9, 1).unwrap().u, BigUint::from(40u32));
        assert!(ball_upper_bound(2, 4, 0).is_err());
        assert!(ball_upper_bound(2, 4, 5).is_err());
        assert!(ball_upper_bound(1, 4, 1).is_err());
    }

    #[test]
    fn ball_bound_dominates_script_count() {
        for k in [2u64, 3, 5] {
            for n in 1..=6 {
                for r in 1..=n {
                    let u = ball_upper_bound(k, n, r).unwrap().u;
                    let s = css_count(k, n, r).unwrap();
                    assert!(u >= s, "k = {k}, n = {n}, r = {r}");
                    assert!(u >= BigUint::one());
                }
            }
        }
    }

    #[test]
    fn eccentricity_floor_values() {
        assert_eq!(ecc_lower_bound(2, 10, 0).unwrap(), 0.0);
        let v1 = ecc_lower_bound(2, 10, 1).unwrap();
        let exact1 = 1013.0 / 1024.0;
        assert!(v1 <= exact1 && exact1 - v1 < 1e-12);
        let v2 = ecc_lower_bound(2, 10, 2).unwrap();
        let exact2 = 2.0 * 769.0 / 1024.0;
        assert!(v2 <= exact2 && exact2 - v2 < 1e-12);
        assert_eq!(ecc_lower_bound(2, 2, 2).unwrap(), 0.0);
        assert!(ecc_lower_bound(2, 4, 5).is_err());
    }

    #[test]
    fn exponential_bound_reference_shape() {
        let rhs = exponential_bound_rhs(2, 0.0, 10).unwrap();
        assert!((rhs - 11.0 / 1024.0).abs() < 1e-12);
        let grown = exponential_bound_rhs(2, 0.17, 40).unwrap();
        assert!(grown.is_finite() && grown > 0.0);
        assert!(exponential_bound_rhs(2, 1.5, 10).is_err());
        assert!(exponential_bound_rhs(2, 0.5, 0).is_err());
        assert!(exponential_bound_rhs(1, 0.5, 10).is_err());
    }
}
