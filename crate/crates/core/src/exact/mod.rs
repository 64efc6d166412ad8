//! Exact computation of eccentricities and expected edit distances.
//!
//! The eccentricity of a string `x` is the mean edit distance from `x`
//! to a uniform random string of the same length. Three routes are
//! implemented: brute-force enumeration of the `k^n` opposing strings,
//! a sweep over the multiset of distinct edit-distance columns (the
//! workhorse), and the same sweep with per-position symbol
//! distributions. Expected distances over random pairs then reduce to a
//! sum of eccentricities over equivalence classes of strings under
//! symbol permutations and reversal.
//!
//! Everything here is exact: results are rationals, and all counting is
//! arbitrary precision. Work is bounded by explicit resource caps that
//! fail hard rather than degrade.

mod column;
mod multiset;
mod symmetry;

pub use column::{next_column, DPColumn};
pub use multiset::{ColumnMultiset, WeightedColumnMultiset};
pub use symmetry::{canonicalize, ClassIter, EquivalenceClass};

use crate::distance::lowmem_units;
use crate::error::{Error, Result};
use crate::rational::ExactRational;
use crate::string::SymbolString;
use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

/// Resource caps for the exact sweeps. All limits are hard errors.
#[derive(Debug, Clone)]
pub struct CdpConfig {
    /// Most distinct columns a multiset may hold during a sweep.
    pub max_columns: usize,
    /// Largest brute-force or class-enumeration search size.
    pub max_enumeration: u64,
}

impl Default for CdpConfig {
    fn default() -> Self {
        CdpConfig {
            max_columns: 1 << 21,
            max_enumeration: 1 << 26,
        }
    }
}

fn checked_pow(base: u64, exp: usize, cap: u64, what: &str) -> Result<u64> {
    let mut out: u64 = 1;
    for _ in 0..exp {
        out = out
            .checked_mul(base)
            .filter(|&v| v <= cap)
            .ok_or_else(|| {
                Error::guard(format!("{what} needs {base}^{exp} steps, cap is {cap}"))
            })?;
    }
    Ok(out)
}

/// Eccentricity by enumerating all `k^n` strings. Reference
/// implementation; guarded by `max_enumeration`.
pub fn eccentricity_naive_with(x: &SymbolString, cfg: &CdpConfig) -> Result<ExactRational> {
    let (k, n) = (x.k(), x.len());
    checked_pow(k, n, cfg.max_enumeration, "naive eccentricity")?;
    let mut y = vec![0u64; n];
    let mut sum: u128 = 0;
    loop {
        sum += lowmem_units(x.symbols(), &y) as u128;
        // Odometer increment; done once it wraps around to all zeros.
        let mut pos = n;
        loop {
            if pos == 0 {
                let num = BigUint::from(sum);
                let den = BigUint::from(k).pow(n as u32);
                return ExactRational::from_biguint_ratio(num, den);
            }
            pos -= 1;
            y[pos] += 1;
            if y[pos] < k {
                break;
            }
            y[pos] = 0;
        }
    }
}

pub fn eccentricity_naive(x: &SymbolString) -> Result<ExactRational> {
    eccentricity_naive_with(x, &CdpConfig::default())
}

/// Sum of `d(x, y)` over all `y` of length `|x|`, via the column
/// multiset sweep.
fn distance_sum_cdp(x: &SymbolString, cfg: &CdpConfig) -> Result<BigUint> {
    let mut c = ColumnMultiset::initial(x.len());
    for _ in 0..x.len() {
        c = c.advance(x, cfg.max_columns)?;
    }
    Ok(c.weighted_bottom_sum())
}

/// Eccentricity via the column multiset sweep. Time scales with the
/// number of distinct columns (at most `min(3^n, k^n)`) instead of
/// `k^n`.
pub fn eccentricity_cdp_with(x: &SymbolString, cfg: &CdpConfig) -> Result<ExactRational> {
    let sum = distance_sum_cdp(x, cfg)?;
    let den = BigUint::from(x.k()).pow(x.len() as u32);
    ExactRational::from_biguint_ratio(sum, den)
}

pub fn eccentricity_cdp(x: &SymbolString) -> Result<ExactRational> {
    eccentricity_cdp_with(x, &CdpConfig::default())
}

/// Expected distance from `x` to a string drawn with independent,
/// per-position symbol distributions. `dists[j][b]` is the probability
/// of symbol `b` at position `j`; every row must sum to 1 exactly.
pub fn eccentricity_weighted_with(
    x: &SymbolString,
    dists: &[Vec<ExactRational>],
    cfg: &CdpConfig,
) -> Result<ExactRational> {
    if dists.len() != x.len() {
        return Err(Error::LengthMismatch(dists.len(), x.len()));
    }
    for (row_idx, row) in dists.iter().enumerate() {
        let mut total = ExactRational::zero();
        for p in row {
            if p < &ExactRational::zero() {
                return Err(Error::domain(format!(
                    "negative probability {p} in distribution row {row_idx}"
                )));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::DistributionNotNormalized {
                row: row_idx,
                sum: total.to_string(),
            });
        }
    }
    let mut c = WeightedColumnMultiset::initial(x.len());
    for row in dists {
        c = c.advance(x, row, cfg.max_columns)?;
    }
    Ok(c.weighted_bottom_sum())
}

pub fn eccentricity_weighted(
    x: &SymbolString,
    dists: &[Vec<ExactRational>],
) -> Result<ExactRational> {
    eccentricity_weighted_with(x, dists, &CdpConfig::default())
}

/// Streams the equivalence classes of length-`n` strings under symbol
/// permutations and reversal. The guard bounds the candidate pattern
/// tree, `min(k, n)^n` nodes at the worst, not `k^n`; alphabets larger
/// than `n` cost no more than `k = n`.
pub fn enumerate_classes_with(k: u64, n: usize, cfg: &CdpConfig) -> Result<ClassIter> {
    if k < 2 {
        return Err(Error::AlphabetTooSmall(k));
    }
    checked_pow(k.min(n as u64).max(1), n, cfg.max_enumeration, "class enumeration")?;
    Ok(ClassIter::new(k, n))
}

pub fn enumerate_classes(k: u64, n: usize) -> Result<ClassIter> {
    enumerate_classes_with(k, n, &CdpConfig::default())
}

/// Exact expected edit distance between two independent uniform strings
/// of length `n`, and the same value divided by `n`. Classes are swept
/// in parallel; every worker's contribution is an exact integer, so the
/// result does not depend on scheduling.
pub fn expected_distance_exact_with(
    k: u64,
    n: usize,
    cfg: &CdpConfig,
) -> Result<(ExactRational, ExactRational)> {
    let classes = enumerate_classes_with(k, n, cfg)?;
    let total = classes
        .par_bridge()
        .map(|class| {
            distance_sum_cdp(&class.representative, cfg).map(|sum| sum * &class.size)
        })
        .try_reduce(BigUint::zero, |a, b| Ok(a + b))?;
    let den = BigUint::from(k).pow(2 * n as u32);
    let e = ExactRational::from_biguint_ratio(total, den)?;
    let alpha = if n == 0 {
        ExactRational::zero()
    } else {
        &e / &ExactRational::from_int(n as i64)
    };
    Ok((e, alpha))
}

pub fn expected_distance_exact(k: u64, n: usize) -> Result<(ExactRational, ExactRational)> {
    expected_distance_exact_with(k, n, &CdpConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(k: u64, letters: &str) -> SymbolString {
        SymbolString::from_letters(k, letters).unwrap()
    }

    #[test]
    fn naive_eccentricity_small_cases() {
        assert_eq!(
            eccentricity_naive(&s(2, "a")).unwrap(),
            ExactRational::ratio(1, 2).unwrap()
        );
        assert_eq!(
            eccentricity_naive(&s(2, "aa")).unwrap(),
            ExactRational::from_int(1)
        );
        assert_eq!(
            eccentricity_naive(&s(2, "ab")).unwrap(),
            ExactRational::from_int(1)
        );
    }

    #[test]
    fn cdp_agrees_with_naive_on_examples() {
        for x in [s(2, "aa"), s(2, "ab"), s(3, "abc"), s(2, "abba")] {
            assert_eq!(
                eccentricity_cdp(&x).unwrap(),
                eccentricity_naive(&x).unwrap()
            );
        }
    }

    #[test]
    fn uniform_weights_recover_the_uniform_eccentricity() {
        let x = s(2, "abab");
        let half = ExactRational::ratio(1, 2).unwrap();
        let dists = vec![vec![half.clone(), half]; 4];
        assert_eq!(
            eccentricity_weighted(&x, &dists).unwrap(),
            eccentricity_cdp(&x).unwrap()
        );
    }

    #[test]
    fn point_mass_weights_recover_a_single_distance() {
        // All probability on "ba": expected distance is d("ab", "ba") = 2.
        let x = s(2, "ab");
        let one = ExactRational::from_int(1);
        let zero = ExactRational::zero();
        let dists = vec![vec![zero.clone(), one.clone()], vec![one, zero]];
        assert_eq!(
            eccentricity_weighted(&x, &dists).unwrap(),
            ExactRational::from_int(2)
        );
    }

    #[test]
    fn weighted_rejects_unnormalized_rows() {
        let x = s(2, "ab");
        let half = ExactRational::ratio(1, 2).unwrap();
        let bad = vec![vec![half.clone(), half.clone()], vec![half.clone(), ExactRational::ratio(1, 3).unwrap()]];
        assert!(matches!(
            eccentricity_weighted(&x, &bad),
            Err(Error::DistributionNotNormalized { row: 1, .. })
        ));
    }

    #[test]
    fn expected_distance_tiny_cases() {
        let (e1, a1) = expected_distance_exact(2, 1).unwrap();
        assert_eq!(e1, ExactRational::ratio(1, 2).unwrap());
        assert_eq!(a1, ExactRational::ratio(1, 2).unwrap());
        let (e2, a2) = expected_distance_exact(2, 2).unwrap();
        assert_eq!(e2, ExactRational::from_int(1));
        assert_eq!(a2, ExactRational::ratio(1, 2).unwrap());
    }

    #[test]
    fn enumeration_guard_trips() {
        let cfg = CdpConfig {
            max_columns: 1 << 20,
            max_enumeration: 100,
        };
        assert!(matches!(
            eccentricity_naive_with(&s(2, "abababab"), &cfg),
            Err(Error::ResourceGuard(_))
        ));
        assert!(matches!(
            enumerate_classes_with(3, 40, &cfg),
            Err(Error::ResourceGuard(_))
        ));
    }
}
