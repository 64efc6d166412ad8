//! Edit and Hamming distance kernels.
//!
//! Three interchangeable implementations of the Levenshtein distance are
//! provided: a full dynamic-programming matrix (the reference), a
//! two-row variant with O(min(n, m)) memory, and a bit-parallel variant
//! in the Myers/Hyyrö style that processes 64 pattern positions per word
//! operation. The bit-parallel kernel sits behind the `bitparallel`
//! feature; everything that consumes distances falls back to the two-row
//! kernel when the feature is off.
//!
//! All costs are unit costs: insertions, deletions, and substitutions
//! each cost 1.

use crate::error::{Error, Result};
use crate::string::SymbolString;

fn check_pair(x: &SymbolString, y: &SymbolString) -> Result<()> {
    if x.k() != y.k() {
        return Err(Error::AlphabetMismatch(x.k(), y.k()));
    }
    Ok(())
}

/// Levenshtein distance via the full (n+1) x (m+1) matrix.
pub fn edit_distance(x: &SymbolString, y: &SymbolString) -> Result<usize> {
    check_pair(x, y)?;
    let (xs, ys) = (x.symbols(), y.symbols());
    let (n, m) = (xs.len(), ys.len());
    let width = m + 1;
    let mut mat = vec![0u32; (n + 1) * width];
    for (j, cell) in mat[..=m].iter_mut().enumerate() {
        *cell = j as u32;
    }
    for i in 1..=n {
        mat[i * width] = i as u32;
        for j in 1..=m {
            let sub = mat[(i - 1) * width + j - 1] + u32::from(xs[i - 1] != ys[j - 1]);
            let del = mat[(i - 1) * width + j] + 1;
            let ins = mat[i * width + j - 1] + 1;
            mat[i * width + j] = sub.min(del).min(ins);
        }
    }
    Ok(mat[n * width + m] as usize)
}

/// Levenshtein distance keeping a single row of the matrix.
pub fn edit_distance_lowmem(x: &SymbolString, y: &SymbolString) -> Result<usize> {
    check_pair(x, y)?;
    Ok(lowmem_units(x.symbols(), y.symbols()))
}

pub(crate) fn lowmem_units(xs: &[u64], ys: &[u64]) -> usize {
    // Iterate over the longer string so the retained row is the shorter one.
    let (short, long) = if xs.len() <= ys.len() { (xs, ys) } else { (ys, xs) };
    let mut row: Vec<u32> = (0..=short.len() as u32).collect();
    for (i, &a) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i as u32 + 1;
        for (j, &b) in short.iter().enumerate() {
            let sub = diag + u32::from(a != b);
            diag = row[j + 1];
            row[j + 1] = sub.min(diag + 1).min(row[j] + 1);
        }
    }
    row[short.len()] as usize
}

/// Hamming distance. Requires equal lengths.
pub fn hamming_distance(x: &SymbolString, y: &SymbolString) -> Result<usize> {
    check_pair(x, y)?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    Ok(x.symbols()
        .iter()
        .zip(y.symbols())
        .filter(|(a, b)| a != b)
        .count())
}

/// Bit-parallel Levenshtein distance (Myers' algorithm, multi-word).
#[cfg(feature = "bitparallel")]
pub fn edit_distance_bitparallel(x: &SymbolString, y: &SymbolString) -> Result<usize> {
    check_pair(x, y)?;
    Ok(bitparallel::distance_units(
        x.symbols(),
        y.symbols(),
        x.k(),
    ))
}

/// Dispatches to the bit-parallel kernel when compiled in, otherwise to
/// the two-row kernel. Used by the samplers, where the pair is already
/// known to share an alphabet.
pub(crate) fn fast_units(xs: &[u64], ys: &[u64], k: u64) -> usize {
    #[cfg(feature = "bitparallel")]
    {
        bitparallel::distance_units(xs, ys, k)
    }
    #[cfg(not(feature = "bitparallel"))]
    {
        let _ = k;
        lowmem_units(xs, ys)
    }
}

#[cfg(feature = "bitparallel")]
mod bitparallel {
    use std::collections::HashMap;

    /// Per-symbol match masks over the pattern, one bit per pattern
    /// position. Dense table when the alphabet is small, hash map keyed
    /// by the symbols that actually occur otherwise.
    enum Peq {
        Dense { masks: Vec<u64>, words: usize },
        Sparse { masks: HashMap<u64, Vec<u64>>, zero: Vec<u64> },
    }

    const DENSE_TABLE_LIMIT: u64 = 1 << 20;

    impl Peq {
        fn build(pattern: &[u64], k: u64) -> Peq {
            let words = pattern.len().div_ceil(64);
            if k.saturating_mul(words as u64) <= DENSE_TABLE_LIMIT {
                let mut masks = vec![0u64; (k as usize) * words];
                for (i, &c) in pattern.iter().enumerate() {
                    masks[c as usize * words + i / 64] |= 1 << (i % 64);
                }
                Peq::Dense { masks, words }
            } else {
                let mut masks: HashMap<u64, Vec<u64>> = HashMap::new();
                for (i, &c) in pattern.iter().enumerate() {
                    masks.entry(c).or_insert_with(|| vec![0u64; words])[i / 64] |= 1 << (i % 64);
                }
                Peq::Sparse { masks, zero: vec![0u64; words] }
            }
        }

        fn masks(&self, c: u64) -> &[u64] {
            match self {
                Peq::Dense { masks, words } => {
                    &masks[c as usize * words..(c as usize + 1) * words]
                }
                Peq::Sparse { masks, zero } => masks.get(&c).map_or(zero, |v| v),
            }
        }
    }

    pub(super) fn distance_units(xs: &[u64], ys: &[u64], k: u64) -> usize {
        // The pattern carries the bit vectors; pick the shorter side.
        let (pat, text) = if xs.len() <= ys.len() { (xs, ys) } else { (ys, xs) };
        if pat.is_empty() {
            return text.len();
        }
        let peq = Peq::build(pat, k);
        let words = pat.len().div_ceil(64);
        let last = 1u64 << ((pat.len() - 1) % 64);

        // vp/vn hold the vertical deltas of the current column, one pair
        // of words per 64 pattern rows. The score tracks the bottom cell
        // and moves with the horizontal carries out of the last word.
        let mut vp = vec![u64::MAX; words];
        let mut vn = vec![0u64; words];
        let mut score = pat.len();

        for &c in text {
            let masks = peq.masks(c);
            let mut hp_carry = true;
            let mut hn_carry = false;
            for w in 0..words {
                let pm = masks[w] | u64::from(hn_carry);
                let d0 = ((pm & vp[w]).wrapping_add(vp[w]) ^ vp[w]) | pm | vn[w];
                let mut hp = vn[w] | !(d0 | vp[w]);
                let mut hn = d0 & vp[w];
                let carry_bit = if w + 1 == words { last } else { 1 << 63 };
                let hp_out = hp & carry_bit != 0;
                let hn_out = hn & carry_bit != 0;
                hp = (hp << 1) | u64::from(hp_carry);
                hn = (hn << 1) | u64::from(hn_carry);
                vp[w] = hn | !(d0 | hp);
                vn[w] = hp & d0;
                hp_carry = hp_out;
                hn_carry = hn_out;
            }
            score += usize::from(hp_carry);
            score -= usize::from(hn_carry);
        }
        score
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(k: u64, letters: &str) -> SymbolString {
        SymbolString::from_letters(k, letters).unwrap()
    }

    #[test]
    fn reference_examples() {
        let e = SymbolString::empty(3).unwrap();
        assert_eq!(edit_distance(&e, &s(3, "abc")).unwrap(), 3);
        assert_eq!(edit_distance(&s(3, "abc"), &e).unwrap(), 3);
        assert_eq!(edit_distance(&s(3, "abc"), &s(3, "abc")).unwrap(), 0);
        assert_eq!(edit_distance(&s(2, "aba"), &s(2, "bab")).unwrap(), 2);
        assert_eq!(edit_distance(&s(2, "ab"), &s(2, "ba")).unwrap(), 2);
        assert_eq!(edit_distance(&s(3, "ac"), &s(3, "abc")).unwrap(), 1);
        assert_eq!(
            edit_distance(&s(20, "kitten"), &s(20, "sitting")).unwrap(),
            3
        );
    }

    #[test]
    fn lowmem_matches_reference_examples() {
        let e = SymbolString::empty(2).unwrap();
        assert_eq!(edit_distance_lowmem(&s(2, "aa"), &e).unwrap(), 2);
        assert_eq!(edit_distance_lowmem(&s(2, "aba"), &s(2, "bab")).unwrap(), 2);
        assert_eq!(
            edit_distance_lowmem(&s(20, "kitten"), &s(20, "sitting")).unwrap(),
            3
        );
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let x = SymbolString::new(2, vec![0, 1]).unwrap();
        let y = SymbolString::new(3, vec![0, 1]).unwrap();
        assert!(matches!(
            edit_distance(&x, &y),
            Err(Error::AlphabetMismatch(2, 3))
        ));
        assert!(matches!(
            hamming_distance(&x, &y),
            Err(Error::AlphabetMismatch(2, 3))
        ));
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&s(2, "aba"), &s(2, "bab")).unwrap(), 3);
        assert_eq!(hamming_distance(&s(2, "aba"), &s(2, "aba")).unwrap(), 0);
        assert!(matches!(
            hamming_distance(&s(2, "ab"), &s(2, "a")),
            Err(Error::LengthMismatch(2, 1))
        ));
    }

    #[cfg(feature = "bitparallel")]
    #[test]
    fn bitparallel_examples() {
        assert_eq!(
            edit_distance_bitparallel(&s(2, "aba"), &s(2, "bab")).unwrap(),
            2
        );
        let e = SymbolString::empty(2).unwrap();
        assert_eq!(edit_distance_bitparallel(&e, &s(2, "ab")).unwrap(), 2);
        assert_eq!(edit_distance_bitparallel(&s(2, "ab"), &e).unwrap(), 2);
    }

    #[cfg(feature = "bitparallel")]
    #[test]
    fn bitparallel_identity_across_word_boundaries() {
        // Length chosen to span four words with a partial last word.
        let n = 64 * 3 + 5;
        let x = SymbolString::new(2, (0..n).map(|i| (i as u64) % 2).collect()).unwrap();
        assert_eq!(edit_distance_bitparallel(&x, &x).unwrap(), 0);
        let y = x.reversed();
        let expected = edit_distance(&x, &y).unwrap();
        assert_eq!(edit_distance_bitparallel(&x, &y).unwrap(), expected);
    }

    #[cfg(feature = "bitparallel")]
    #[test]
    fn bitparallel_sparse_alphabet() {
        // Alphabet large enough to force the hash-map match table.
        let k = 1 << 40;
        let xs: Vec<u64> = (0..200u64)
            .map(|i| i.wrapping_mul(0x9e3779b97f4a7c15) % k)
            .collect();
        let ys: Vec<u64> = xs.iter().rev().copied().collect();
        let x = SymbolString::new(k, xs).unwrap();
        let y = SymbolString::new(k, ys).unwrap();
        assert_eq!(
            edit_distance_bitparallel(&x, &y).unwrap(),
            edit_distance(&x, &y).unwrap()
        );
    }
}
