use edconst::distance::{
    edit_distance, edit_distance_bitparallel, edit_distance_lowmem, hamming_distance,
};
use edconst::{Error, SymbolString};
use proptest::prelude::*;

fn s(k: u64, symbols: &[u64]) -> SymbolString {
    SymbolString::new(k, symbols.to_vec()).unwrap()
}

/// All binary strings of length `n`, as symbol vectors.
fn binary_strings(n: usize) -> impl Iterator<Item = Vec<u64>> {
    (0u64..1 << n).map(move |bits| (0..n).map(|i| (bits >> i) & 1).collect())
}

fn triple(k: u64, max_len: usize) -> impl Strategy<Value = (SymbolString, SymbolString, SymbolString)> {
    let one = move |k: u64| prop::collection::vec(0..k, 0..=max_len);
    (one(k), one(k), one(k)).prop_map(move |(a, b, c)| (s(k, &a), s(k, &b), s(k, &c)))
}

proptest! {
    #[test]
    fn metric_axioms((x, y, z) in (2u64..=3).prop_flat_map(|k| triple(k, 8))) {
        let dxy = edit_distance(&x, &y).unwrap();
        let dyx = edit_distance(&y, &x).unwrap();
        prop_assert_eq!(dxy, dyx);
        prop_assert_eq!(edit_distance(&x, &x).unwrap(), 0);
        prop_assert_eq!(dxy == 0, x == y);
        let dxz = edit_distance(&x, &z).unwrap();
        let dzy = edit_distance(&z, &y).unwrap();
        prop_assert!(dxy <= dxz + dzy);
    }

    #[test]
    fn distance_respects_length_bounds((x, y, _) in (2u64..=4).prop_flat_map(|k| triple(k, 12))) {
        let d = edit_distance(&x, &y).unwrap();
        let (n, m) = (x.len(), y.len());
        prop_assert!(d >= n.abs_diff(m));
        prop_assert!(d <= n.max(m));
        if n == m {
            prop_assert!(d <= hamming_distance(&x, &y).unwrap());
        }
    }

    #[test]
    fn reversal_and_relabeling_preserve_distance((x, y, _) in (2u64..=4).prop_flat_map(|k| triple(k, 10))) {
        let d = edit_distance(&x, &y).unwrap();
        prop_assert_eq!(edit_distance(&x.reversed(), &y.reversed()).unwrap(), d);
        // Any permutation of the alphabet; rotation is one.
        let k = x.k();
        let rot = |v: &SymbolString| s(k, &v.symbols().iter().map(|&b| (b + 1) % k).collect::<Vec<_>>());
        prop_assert_eq!(edit_distance(&rot(&x), &rot(&y)).unwrap(), d);
    }

    #[test]
    fn kernels_agree((x, y, _) in (2u64..=5).prop_flat_map(|k| triple(k, 40))) {
        let d = edit_distance(&x, &y).unwrap();
        prop_assert_eq!(edit_distance_lowmem(&x, &y).unwrap(), d);
        prop_assert_eq!(edit_distance_bitparallel(&x, &y).unwrap(), d);
    }
}

#[test]
fn known_distances() {
    assert_eq!(edit_distance(&s(3, &[0, 1]), &s(3, &[1, 0])).unwrap(), 2);
    let kitten = SymbolString::from_letters(26, "kitten").unwrap();
    let sitting = SymbolString::from_letters(26, "sitting").unwrap();
    assert_eq!(edit_distance(&kitten, &sitting).unwrap(), 3);
    let e = SymbolString::empty(3).unwrap();
    assert_eq!(edit_distance(&s(3, &[0, 1, 2]), &e).unwrap(), 3);
    assert_eq!(edit_distance(&s(3, &[0, 2]), &s(3, &[0, 1, 2])).unwrap(), 1);
}

#[test]
fn mismatched_alphabets_are_rejected() {
    let x = s(2, &[0, 1]);
    let y = s(3, &[0, 1]);
    for r in [
        edit_distance(&x, &y),
        edit_distance_lowmem(&x, &y),
        edit_distance_bitparallel(&x, &y),
        hamming_distance(&x, &y),
    ] {
        assert!(matches!(r, Err(Error::AlphabetMismatch(2, 3))));
    }
    assert!(matches!(
        hamming_distance(&s(2, &[0]), &s(2, &[0, 1])),
        Err(Error::LengthMismatch(1, 2))
    ));
}

#[test]
fn single_edits_move_the_distance_by_at_most_one() {
    // Exhaustive over binary strings up to length 6: every substitution,
    // insertion, or deletion applied to one argument shifts the distance
    // to any fixed counterpart by at most 1.
    for n in 0..=6usize {
        for xs in binary_strings(n) {
            let x = s(2, &xs);
            let mut edits: Vec<SymbolString> = Vec::new();
            for i in 0..n {
                let mut v = xs.clone();
                v[i] ^= 1;
                edits.push(s(2, &v));
                let mut w = xs.clone();
                w.remove(i);
                edits.push(s(2, &w));
            }
            for i in 0..=n {
                for b in 0..2u64 {
                    let mut v = xs.clone();
                    v.insert(i, b);
                    edits.push(s(2, &v));
                }
            }
            for e in &edits {
                assert!(edit_distance(&x, e).unwrap() <= 1);
            }
            // Lipschitz in one argument against a few fixed anchors.
            for ys in binary_strings(4.min(n + 1)) {
                let y = s(2, &ys);
                let base = edit_distance(&x, &y).unwrap();
                for e in &edits {
                    let moved = edit_distance(e, &y).unwrap();
                    assert!(base.abs_diff(moved) <= 1, "{x} -> {e} vs {y}");
                }
            }
        }
    }
}

#[test]
fn exhaustive_small_binary_agreement() {
    for n in 0..=4usize {
        for m in 0..=4usize {
            for xs in binary_strings(n) {
                let x = s(2, &xs);
                for ys in binary_strings(m) {
                    let y = s(2, &ys);
                    let d = edit_distance(&x, &y).unwrap();
                    assert_eq!(edit_distance_lowmem(&x, &y).unwrap(), d);
                    assert_eq!(edit_distance_bitparallel(&x, &y).unwrap(), d);
                }
            }
        }
    }
}
