//! Monte Carlo estimation of the expected edit distance, with
//! distribution-free confidence intervals.
//!
//! Sampling is counter-based: pair `i` of a run is drawn from a ChaCha12
//! stream selected by `(seed, i)`, so the sample set is a pure function
//! of the seed and every pair can be regenerated in isolation. Results
//! are accumulated as exact integer sums of distances and squared
//! distances before any float enters, which makes the reported
//! statistics bit-identical no matter how the work is split across
//! threads.
//!
//! The intervals come from a bounded-differences inequality: changing
//! one symbol of the `2Nn` sampled symbols moves the mean distance by at
//! most `1/(Nn)`. The interval for the limit constant additionally
//! shifts and widens by half the convergence-rate bound `Q(n)`, which
//! covers the gap between the length-`n` expectation and its limit.

use crate::distance::fast_units;
use crate::error::{Error, Result};
use crate::string::SymbolString;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Outcome of one estimation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub k: u64,
    pub n: usize,
    #[serde(rename = "N")]
    pub nsamples: u64,
    pub mean_distance: f64,
    pub alpha_tilde: f64,
    /// Sample standard deviation of the single-pair distance; 0 when
    /// only one pair was drawn.
    pub sample_stddev: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiKind {
    ForAlphaN,
    ForAlphaLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub center: f64,
    pub radius: f64,
    pub level: f64,
    pub n: usize,
    #[serde(rename = "N")]
    pub nsamples: u64,
    pub kind: CiKind,
}

impl ConfidenceInterval {
    pub fn lower(&self) -> f64 {
        self.center - self.radius
    }

    pub fn upper(&self) -> f64 {
        self.center + self.radius
    }
}

/// Draws from `0..k` with no modulo bias: multiply a 64-bit draw by `k`,
/// take the high word, and reject the small low-word band that would
/// favor early residues. Power-of-two `k` never rejects.
fn bounded_symbol(rng: &mut ChaCha12Rng, k: u64) -> u64 {
    let threshold = k.wrapping_neg() % k;
    loop {
        let wide = u128::from(rng.next_u64()) * u128::from(k);
        if (wide as u64) >= threshold {
            return (wide >> 64) as u64;
        }
    }
}

fn pair_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// The `index`-th pair of the run keyed by `seed`: two independent
/// uniform strings of length `n` over `0..k`.
pub fn sample_pair(seed: u64, index: u64, k: u64, n: usize) -> Result<(SymbolString, SymbolString)> {
    if k < 2 {
        return Err(Error::AlphabetTooSmall(k));
    }
    let mut rng = pair_rng(seed, index);
    let xs = (0..n).map(|_| bounded_symbol(&mut rng, k)).collect();
    let ys = (0..n).map(|_| bounded_symbol(&mut rng, k)).collect();
    Ok((SymbolString::new(k, xs)?, SymbolString::new(k, ys)?))
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        Ok(f())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::guard(format!("worker pool: {e}")))?;
        Ok(pool.install(f))
    }
}

fn stats_from_sums(
    k: u64,
    n: usize,
    nsamples: u64,
    seed: u64,
    sum: u128,
    sum_sq: u128,
) -> SampleStats {
    let mean = sum as f64 / nsamples as f64;
    let stddev = if nsamples < 2 {
        0.0
    } else {
        // N * sum_sq - sum^2 fits u128: distances are at most n.
        let spread = nsamples as u128 * sum_sq - sum * sum;
        (spread as f64 / (nsamples as f64 * (nsamples - 1) as f64)).sqrt()
    };
    SampleStats {
        k,
        n,
        nsamples,
        mean_distance: mean,
        alpha_tilde: mean / n as f64,
        sample_stddev: stddev,
        seed,
    }
}

fn estimate_with_sampler(
    k: u64,
    n: usize,
    nsamples: u64,
    seed: u64,
    workers: usize,
    pair_distance: impl Fn(u64) -> usize + Sync,
) -> Result<SampleStats> {
    if k < 2 {
        return Err(Error::AlphabetTooSmall(k));
    }
    if n == 0 {
        return Err(Error::domain("estimation needs n >= 1"));
    }
    if nsamples == 0 {
        return Err(Error::domain("estimation needs at least one sample"));
    }
    let (sum, sum_sq) = with_pool(workers, || {
        (0..nsamples)
            .into_par_iter()
            .map(|i| {
                let d = pair_distance(i) as u128;
                (d, d * d)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    })?;
    Ok(stats_from_sums(k, n, nsamples, seed, sum, sum_sq))
}

/// Estimates `alpha_k(n)` from `nsamples` independent pairs.
///
/// `workers = 0` runs in the ambient thread pool; any other value uses a
/// dedicated pool of that size. The returned statistics are identical
/// for every choice of `workers`.
pub fn estimate_alpha_n(
    k: u64,
    n: usize,
    nsamples: u64,
    seed: u64,
    workers: usize,
) -> Result<SampleStats> {
    estimate_with_sampler(k, n, nsamples, seed, workers, |i| {
        let mut rng = pair_rng(seed, i);
        let xs: Vec<u64> = (0..n).map(|_| bounded_symbol(&mut rng, k)).collect();
        let ys: Vec<u64> = (0..n).map(|_| bounded_symbol(&mut rng, k)).collect();
        fast_units(&xs, &ys, k)
    })
}

fn check_level(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::domain(format!(
            "confidence level must be in (0, 1), got {lambda}"
        )));
    }
    Ok(())
}

/// Confidence radius `sqrt(ln(2 / (1 - lambda)) / (N n))` at level
/// `lambda` for an estimate built from `N` pairs of length-`n` strings.
pub fn delta_radius(n: usize, nsamples: u64, lambda: f64) -> Result<f64> {
    check_level(lambda)?;
    if n == 0 || nsamples == 0 {
        return Err(Error::domain("confidence radius needs n >= 1 and N >= 1"));
    }
    Ok(((2.0 / (1.0 - lambda)).ln() / (nsamples as f64 * n as f64)).sqrt())
}

/// Upper bound `Q(n)` on the gap `alpha_k(n) - alpha_k`, valid for every
/// `k`. Defined for `n >= 2`.
pub fn q_rate_bound(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("rate bound needs n >= 2"));
    }
    let nf = n as f64;
    let inner = (nf + 1.0) / (nf - 1.0) + (nf - 1.0).ln();
    Ok((2.0 / (nf - 1.0) * inner).sqrt() + 1.0 / (nf - 1.0))
}

/// Two-sided interval for `alpha_k(n)` at confidence level `lambda`.
pub fn ci_alpha_n(stats: &SampleStats, lambda: f64) -> Result<ConfidenceInterval> {
    let radius = delta_radius(stats.n, stats.nsamples, lambda)?;
    Ok(ConfidenceInterval {
        center: stats.alpha_tilde,
        radius,
        level: lambda,
        n: stats.n,
        nsamples: stats.nsamples,
        kind: CiKind::ForAlphaN,
    })
}

/// Interval for the limit `alpha_k`: the estimate is shifted down by
/// `Q(n)/2` and the radius widens by the same amount, absorbing the
/// worst-case convergence gap.
pub fn ci_alpha_limit(stats: &SampleStats, lambda: f64) -> Result<ConfidenceInterval> {
    let delta = delta_radius(stats.n, stats.nsamples, lambda)?;
    let q = q_rate_bound(stats.n)?;
    Ok(ConfidenceInterval {
        center: stats.alpha_tilde - q / 2.0,
        radius: delta + q / 2.0,
        level: lambda,
        n: stats.n,
        nsamples: stats.nsamples,
        kind: CiKind::ForAlphaLimit,
    })
}

/// Estimate of `(1 - alpha_k(n)) k`, the rescaled distance defect used
/// to probe how `1 - alpha_k` decays with the alphabet size. Runs in
/// the ambient thread pool.
pub fn estimate_c_alpha(k: u64, n: usize, nsamples: u64, seed: u64) -> Result<(f64, SampleStats)> {
    let stats = estimate_alpha_n(k, n, nsamples, seed, 0)?;
    Ok(((1.0 - stats.alpha_tilde) * k as f64, stats))
}

/// Draws a string whose position `j` has symbol distribution
/// `dists[j]`, by inverse CDF over exact 53-bit uniforms. A hook for
/// validating the samplers against the exact weighted sweep.
pub fn sample_string_distributed(
    seed: u64,
    index: u64,
    k: u64,
    dists: &[Vec<f64>],
) -> Result<SymbolString> {
    if k < 2 {
        return Err(Error::AlphabetTooSmall(k));
    }
    validate_float_dists(k, dists)?;
    let mut rng = pair_rng(seed, index);
    let symbols = dists
        .iter()
        .map(|row| {
            let u = (rng.next_u64() >> 11) as f64 * 2f64.powi(-53);
            let mut acc = 0.0;
            for (b, p) in row.iter().enumerate() {
                acc += p;
                if u < acc {
                    return b as u64;
                }
            }
            row.len() as u64 - 1
        })
        .collect();
    SymbolString::new(k, symbols)
}

/// Mean distance from a fixed `x` to strings drawn with per-position
/// distributions; the sampled counterpart of the exact weighted sweep.
pub fn estimate_eccentricity_distributed(
    x: &SymbolString,
    dists: &[Vec<f64>],
    nsamples: u64,
    seed: u64,
    workers: usize,
) -> Result<SampleStats> {
    if dists.len() != x.len() {
        return Err(Error::LengthMismatch(dists.len(), x.len()));
    }
    validate_float_dists(x.k(), dists)?;
    estimate_with_sampler(x.k(), x.len(), nsamples, seed, workers, |i| {
        let y = sample_string_distributed(seed, i, x.k(), dists).expect("validated rows");
        fast_units(x.symbols(), y.symbols(), x.k())
    })
}

fn validate_float_dists(k: u64, dists: &[Vec<f64>]) -> Result<()> {
    for (row_idx, row) in dists.iter().enumerate() {
        if row.len() as u64 != k {
            return Err(Error::LengthMismatch(row.len(), k as usize));
        }
        if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::domain(format!(
                "probabilities outside [0, 1] in row {row_idx}"
            )));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::DistributionNotNormalized {
                row: row_idx,
                sum: format!("{sum}"),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_a_pure_function_of_seed_and_index() {
        let (x1, y1) = sample_pair(7, 3, 4, 50).unwrap();
        let (x2, y2) = sample_pair(7, 3, 4, 50).unwrap();
        assert_eq!(x1, x2);
        assert_eq!(y1, y2);
        let (x3, _) = sample_pair(7, 4, 4, 50).unwrap();
        assert_ne!(x1, x3);
        let (x4, _) = sample_pair(8, 3, 4, 50).unwrap();
        assert_ne!(x1, x4);
        assert!(x1.symbols().iter().all(|&s| s < 4));
    }

    #[test]
    fn estimates_do_not_depend_on_worker_count() {
        let base = estimate_alpha_n(3, 50, 200, 7, 1).unwrap();
        for workers in [2, 8] {
            let other = estimate_alpha_n(3, 50, 200, 7, workers).unwrap();
            assert_eq!(base, other);
        }
    }

    #[test]
    fn single_sample_has_zero_stddev() {
        let stats = estimate_alpha_n(2, 32, 1, 5, 1).unwrap();
        assert_eq!(stats.sample_stddev, 0.0);
        assert_eq!(stats.mean_distance, stats.alpha_tilde * 32.0);
    }

    #[test]
    fn confidence_radius_reference_values() {
        let d = delta_radius(1 << 15, 1 << 9, 0.999).unwrap();
        assert!((d - 6.730892148e-4).abs() < 1e-12);
        let d2 = delta_radius(1 << 8, 1 << 23, 0.999).unwrap();
        assert!((d2 - 5.949324352e-5).abs() < 1e-13);
        assert!(delta_radius(10, 10, 1.0).is_err());
        assert!(delta_radius(10, 10, 0.0).is_err());
        assert!(delta_radius(0, 10, 0.5).is_err());
    }

    #[test]
    fn rate_bound_reference_values() {
        assert!(q_rate_bound(1).is_err());
        assert!((q_rate_bound(2).unwrap() - (1.0 + 6f64.sqrt())).abs() < 1e-12);
        assert!((q_rate_bound(1 << 15).unwrap() - 0.02640576155).abs() < 1e-10);
        let qs: Vec<f64> = (2..=100).map(|n| q_rate_bound(n).unwrap()).collect();
        assert!(qs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn interval_shapes() {
        let stats = estimate_alpha_n(4, 64, 16, 1, 1).unwrap();
        let ci_n = ci_alpha_n(&stats, 0.999).unwrap();
        assert_eq!(ci_n.center, stats.alpha_tilde);
        assert_eq!(ci_n.kind, CiKind::ForAlphaN);
        let ci_l = ci_alpha_limit(&stats, 0.999).unwrap();
        let q = q_rate_bound(64).unwrap();
        assert!((ci_l.center - (stats.alpha_tilde - q / 2.0)).abs() < 1e-15);
        assert!((ci_l.radius - (ci_n.radius + q / 2.0)).abs() < 1e-15);
        assert!(ci_l.lower() < ci_n.lower() && ci_l.upper() > ci_n.upper() - q);
    }

    #[test]
    fn symbol_frequencies_are_balanced() {
        // Binary case: half a million symbols, frequency of 0 within 1%.
        let (x, y) = sample_pair(11, 0, 2, 100_000).unwrap();
        let zeros = x.symbols().iter().chain(y.symbols()).filter(|&&s| s == 0).count();
        let freq = zeros as f64 / 200_000.0;
        assert!((freq - 0.5).abs() < 0.01, "freq {freq}");
    }

    fn chi_square_symbols(k: u64, draws: u64, seed: u64) -> f64 {
        let mut rng = pair_rng(seed, 0);
        let mut counts = vec![0u64; k as usize];
        for _ in 0..draws {
            counts[bounded_symbol(&mut rng, k) as usize] += 1;
        }
        let expected = draws as f64 / k as f64;
        counts
            .iter()
            .map(|&c| {
                let diff = c as f64 - expected;
                diff * diff / expected
            })
            .sum()
    }

    #[test]
    fn chi_square_on_a_million_draws() {
        // Critical values at significance 0.001 for k-1 degrees of
        // freedom; the statistics are deterministic for fixed seeds.
        assert!(chi_square_symbols(2, 1_000_000, 3) < 10.828);
        assert!(chi_square_symbols(3, 1_000_000, 3) < 13.816);
        assert!(chi_square_symbols(5, 1_000_000, 3) < 18.467);
    }

    #[test]
    fn consecutive_indices_look_independent() {
        // Correlation between distances of consecutive pairs over many
        // short strings; should be tiny for a counter-based stream.
        let n = 64;
        let ds: Vec<f64> = (0..2000)
            .map(|i| {
                let (x, y) = sample_pair(19, i, 2, n).unwrap();
                fast_units(x.symbols(), y.symbols(), 2) as f64
            })
            .collect();
        let mean = ds.iter().sum::<f64>() / ds.len() as f64;
        let var: f64 = ds.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>();
        let cov: f64 = ds
            .windows(2)
            .map(|w| (w[0] - mean) * (w[1] - mean))
            .sum::<f64>();
        assert!((cov / var).abs() < 0.1);
    }

    #[test]
    fn point_mass_rows_sample_deterministically() {
        let rows = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let y = sample_string_distributed(5, 9, 2, &rows).unwrap();
        assert_eq!(y.symbols(), &[1, 0, 1]);
    }

    #[test]
    fn distributed_rows_are_validated() {
        assert!(matches!(
            sample_string_distributed(5, 0, 2, &[vec![0.6, 0.6]]),
            Err(Error::DistributionNotNormalized { row: 0, .. })
        ));
        assert!(sample_string_distributed(5, 0, 2, &[vec![0.5; 3]]).is_err());
    }

    #[test]
    fn c_alpha_is_rescaled_defect() {
        let (c, stats) = estimate_c_alpha(4, 128, 8, 2).unwrap();
        assert!((c - (1.0 - stats.alpha_tilde) * 4.0).abs() < 1e-15);
    }
}
