use edconst::distance::edit_distance;
use edconst::exact::{eccentricity_cdp, expected_distance_exact};
use edconst::montecarlo::{
    ci_alpha_limit, ci_alpha_n, delta_radius, estimate_alpha_n, estimate_c_alpha,
    estimate_eccentricity_distributed, q_rate_bound, sample_pair, CiKind,
};
use edconst::SymbolString;

#[test]
fn interval_coverage_against_the_exact_value() {
    // alpha_2(4) is known exactly; 200 independent runs at level 0.95
    // must cover it essentially always, the radius being conservative.
    let (_, alpha) = expected_distance_exact(2, 4).unwrap();
    let truth = alpha.to_f64();
    let mut covered = 0;
    for seed in 0..200u64 {
        let stats = estimate_alpha_n(2, 4, 50, seed, 0).unwrap();
        let ci = ci_alpha_n(&stats, 0.95).unwrap();
        if ci.lower() <= truth && truth <= ci.upper() {
            covered += 1;
        }
    }
    assert!(covered >= 195, "covered only {covered}/200");
}

#[test]
fn independent_seeds_agree_within_sampling_error() {
    let runs: Vec<_> = (0..6u64)
        .map(|seed| estimate_alpha_n(2, 256, 4096, seed, 0).unwrap())
        .collect();
    for w in runs.windows(2) {
        let se = |s: &edconst::montecarlo::SampleStats| {
            s.sample_stddev / (s.nsamples as f64).sqrt() / s.n as f64
        };
        let gap = (w[0].alpha_tilde - w[1].alpha_tilde).abs();
        assert!(gap <= 4.0 * (se(&w[0]) + se(&w[1])), "gap {gap}");
    }
}

#[test]
fn estimate_tracks_the_exact_expectation() {
    let (_, alpha) = expected_distance_exact(2, 8).unwrap();
    let stats = estimate_alpha_n(2, 8, 40_000, 17, 0).unwrap();
    let radius = delta_radius(8, 40_000, 0.999).unwrap();
    assert!((stats.alpha_tilde - alpha.to_f64()).abs() <= radius);
}

#[test]
fn limit_interval_contains_the_length_n_interval_shifted() {
    let stats = estimate_alpha_n(3, 128, 512, 5, 0).unwrap();
    let ci_n = ci_alpha_n(&stats, 0.999).unwrap();
    let ci_l = ci_alpha_limit(&stats, 0.999).unwrap();
    assert_eq!(ci_n.kind, CiKind::ForAlphaN);
    assert_eq!(ci_l.kind, CiKind::ForAlphaLimit);
    let q = q_rate_bound(128).unwrap();
    assert!((ci_l.center - (ci_n.center - q / 2.0)).abs() < 1e-15);
    assert!((ci_l.radius - (ci_n.radius + q / 2.0)).abs() < 1e-15);
    // The limit interval covers everything from "no gap" to "full gap".
    assert!(ci_l.lower() <= ci_n.lower() - q + 1e-15);
    assert!(ci_l.upper() >= ci_n.upper() - q - 1e-15);
}

#[test]
fn point_mass_rows_reproduce_a_single_distance() {
    let x = SymbolString::from_letters(3, "abcab").unwrap();
    let y = SymbolString::from_letters(3, "cabc" ).unwrap();
    // Rows put probability 1 on y's symbols; pad the tail with 'a'.
    let mut rows = vec![vec![0.0f64; 3]; 5];
    for (j, row) in rows.iter_mut().enumerate() {
        let b = if j < y.len() { y.symbols()[j] } else { 0 };
        row[b as usize] = 1.0;
    }
    let y_padded = SymbolString::from_letters(3, "cabca").unwrap();
    let d = edit_distance(&x, &y_padded).unwrap() as f64;
    for nsamples in [1u64, 7, 64] {
        let stats = estimate_eccentricity_distributed(&x, &rows, nsamples, 3, 0).unwrap();
        assert_eq!(stats.mean_distance, d);
        assert_eq!(stats.sample_stddev, 0.0);
    }
}

#[test]
fn distributed_sampling_matches_the_exact_weighted_mean() {
    let x = SymbolString::from_letters(2, "abba").unwrap();
    let rows = vec![vec![0.5f64, 0.5]; 4];
    let exact = eccentricity_cdp(&x).unwrap().to_f64();
    let stats = estimate_eccentricity_distributed(&x, &rows, 60_000, 11, 0).unwrap();
    let se = stats.sample_stddev / (stats.nsamples as f64).sqrt();
    assert!(
        (stats.mean_distance - exact).abs() <= 4.0 * se + 1e-9,
        "mean {} vs exact {exact}",
        stats.mean_distance
    );
}

#[test]
fn rescaled_defect_estimates_are_consistent() {
    let (c, stats) = estimate_c_alpha(8, 512, 128, 23).unwrap();
    assert!((c - (1.0 - stats.alpha_tilde) * 8.0).abs() < 1e-12);
    assert!(c > 0.0 && c < 8.0);
}

#[test]
fn pairs_are_reproducible_and_in_range() {
    for (seed, index, k, n) in [(0u64, 0u64, 2u64, 16usize), (9, 4, 7, 33), (3, 1 << 20, 97, 5)] {
        let (x1, y1) = sample_pair(seed, index, k, n).unwrap();
        let (x2, y2) = sample_pair(seed, index, k, n).unwrap();
        assert_eq!(x1, x2);
        assert_eq!(y1, y2);
        assert_eq!(x1.len(), n);
        assert!(x1.symbols().iter().chain(y1.symbols()).all(|&b| b < k));
    }
}
