use super::column::{advance_values, DPColumn};
use crate::error::{Error, Result};
use crate::rational::ExactRational;
use crate::string::SymbolString;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Column keys pack the delta vector at two bits per entry (delta + 1),
/// 32 entries per word. The base is implied by the sweep index, so it is
/// not part of the key.
#[derive(Clone, Copy)]
struct Codec {
    n: usize,
    words: usize,
}

impl Codec {
    fn new(n: usize) -> Codec {
        Codec {
            n,
            words: n.div_ceil(32).max(1),
        }
    }

    fn encode(&self, values: &[u32]) -> Box<[u64]> {
        let mut key = vec![0u64; self.words];
        for i in 0..self.n {
            let delta = (values[i + 1] as i64 - values[i] as i64 + 1) as u64;
            debug_assert!(delta <= 2);
            key[i / 32] |= delta << (2 * (i % 32));
        }
        key.into_boxed_slice()
    }

    fn decode(&self, key: &[u64], base: u32, values: &mut [u32]) {
        values[0] = base;
        let mut v = base as i64;
        for i in 0..self.n {
            let delta = (key[i / 32] >> (2 * (i % 32))) & 3;
            v += delta as i64 - 1;
            values[i + 1] = v as u32;
        }
    }
}

/// The multiset of edit-distance columns of a fixed string `x` against
/// all `k^j` strings of length `j`, with one multiplicity per distinct
/// column. Advancing from `j` to `j + 1` costs time proportional to the
/// number of distinct columns rather than to `k^j`.
pub struct ColumnMultiset {
    codec: Codec,
    j: usize,
    entries: HashMap<Box<[u64]>, BigUint>,
}

impl ColumnMultiset {
    /// The multiset for `j = 0`: the single initial column, once.
    pub fn initial(n: usize) -> ColumnMultiset {
        let codec = Codec::new(n);
        let mut entries = HashMap::new();
        let values: Vec<u32> = (0..=n as u32).collect();
        entries.insert(codec.encode(&values), BigUint::one());
        ColumnMultiset { codec, j: 0, entries }
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn n(&self) -> usize {
        self.codec.n
    }

    pub fn distinct_columns(&self) -> usize {
        self.entries.len()
    }

    /// Sum of multiplicities; equals `k^j` throughout a sweep.
    pub fn total_multiplicity(&self) -> BigUint {
        self.entries.values().sum()
    }

    /// Decoded view of the entries, for inspection and tests.
    pub fn columns(&self) -> Vec<(DPColumn, BigUint)> {
        let mut values = vec![0u32; self.n() + 1];
        self.entries
            .iter()
            .map(|(key, mult)| {
                self.codec.decode(key, self.j as u32, &mut values);
                (DPColumn::from_values(&values), mult.clone())
            })
            .collect()
    }

    /// Multiplicity-weighted sum of the bottom entries. After `n`
    /// advances this is the sum of `d(x, y)` over all `y` of length `n`.
    pub fn weighted_bottom_sum(&self) -> BigUint {
        let n = self.n();
        let mut values = vec![0u32; n + 1];
        let mut total = BigUint::zero();
        for (key, mult) in &self.entries {
            self.codec.decode(key, self.j as u32, &mut values);
            total += mult * BigUint::from(values[n]);
        }
        total
    }

    /// One sweep step: the multiset against all strings of length
    /// `j + 1`. Symbols that do not occur in `x` all produce the same
    /// successor column, so they are processed once with weight
    /// `k - |distinct(x)|`.
    pub fn advance(&self, x: &SymbolString, max_columns: usize) -> Result<ColumnMultiset> {
        if x.len() != self.n() {
            return Err(Error::LengthMismatch(x.len(), self.n()));
        }
        let mut branch: Vec<(u64, u64)> = Vec::new();
        {
            let mut seen = std::collections::HashSet::new();
            for &s in x.symbols() {
                if seen.insert(s) {
                    branch.push((s, 1));
                }
            }
            let outside = x.k() - seen.len() as u64;
            if outside > 0 {
                let rep = (0..x.k()).find(|s| !seen.contains(s)).unwrap();
                branch.push((rep, outside));
            }
        }

        let j = self.j + 1;
        let mut next = HashMap::with_capacity(self.entries.len());
        let mut prev_vals = vec![0u32; self.n() + 1];
        let mut next_vals = vec![0u32; self.n() + 1];
        for (key, mult) in &self.entries {
            self.codec.decode(key, self.j as u32, &mut prev_vals);
            for &(b, weight) in &branch {
                advance_values(x.symbols(), &prev_vals, &mut next_vals, j as u32, b);
                let key = self.codec.encode(&next_vals);
                *next.entry(key).or_insert_with(BigUint::zero) += mult * weight;
            }
            if next.len() > max_columns {
                return Err(Error::guard(format!(
                    "column multiset exceeded {max_columns} distinct columns"
                )));
            }
        }
        Ok(ColumnMultiset {
            codec: self.codec,
            j,
            entries: next,
        })
    }
}

/// Variant of [`ColumnMultiset`] for independently, non-uniformly drawn
/// symbols: each column carries its exact probability instead of a count.
pub struct WeightedColumnMultiset {
    codec: Codec,
    j: usize,
    entries: HashMap<Box<[u64]>, BigRational>,
}

impl WeightedColumnMultiset {
    pub fn initial(n: usize) -> WeightedColumnMultiset {
        let codec = Codec::new(n);
        let mut entries = HashMap::new();
        let values: Vec<u32> = (0..=n as u32).collect();
        entries.insert(codec.encode(&values), BigRational::one());
        WeightedColumnMultiset { codec, j: 0, entries }
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn n(&self) -> usize {
        self.codec.n
    }

    pub fn distinct_columns(&self) -> usize {
        self.entries.len()
    }

    pub fn total_probability(&self) -> ExactRational {
        let mut total = BigRational::zero();
        for w in self.entries.values() {
            total += w;
        }
        total.into()
    }

    /// Probability-weighted sum of the bottom entries: after `n`
    /// advances, the expected distance from `x` to the random string.
    pub fn weighted_bottom_sum(&self) -> ExactRational {
        let n = self.n();
        let mut values = vec![0u32; n + 1];
        let mut total = BigRational::zero();
        for (key, weight) in &self.entries {
            self.codec.decode(key, self.j as u32, &mut values);
            total += weight * BigRational::from_integer(values[n].into());
        }
        total.into()
    }

    /// One sweep step where position `j` of the random string has symbol
    /// distribution `row` (one probability per symbol). Zero-probability
    /// symbols are skipped, so point masses stay cheap.
    pub fn advance(
        &self,
        x: &SymbolString,
        row: &[ExactRational],
        max_columns: usize,
    ) -> Result<WeightedColumnMultiset> {
        if x.len() != self.n() {
            return Err(Error::LengthMismatch(x.len(), self.n()));
        }
        if row.len() as u64 != x.k() {
            return Err(Error::LengthMismatch(row.len(), x.k() as usize));
        }
        let j = self.j + 1;
        let mut next: HashMap<Box<[u64]>, BigRational> =
            HashMap::with_capacity(self.entries.len());
        let mut prev_vals = vec![0u32; self.n() + 1];
        let mut next_vals = vec![0u32; self.n() + 1];
        for (key, weight) in &self.entries {
            self.codec.decode(key, self.j as u32, &mut prev_vals);
            for (b, p) in row.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                advance_values(x.symbols(), &prev_vals, &mut next_vals, j as u32, b as u64);
                let key = self.codec.encode(&next_vals);
                let w = weight * p.as_ratio();
                match next.entry(key) {
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += w,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(w);
                    }
                }
            }
            if next.len() > max_columns {
                return Err(Error::guard(format!(
                    "column multiset exceeded {max_columns} distinct columns"
                )));
            }
        }
        Ok(WeightedColumnMultiset {
            codec: self.codec,
            j,
            entries: next,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_multiset_is_one_column() {
        let c = ColumnMultiset::initial(3);
        assert_eq!(c.distinct_columns(), 1);
        assert_eq!(c.total_multiplicity(), BigUint::one());
        let cols = c.columns();
        assert_eq!(cols[0].0.values(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn mass_tracks_alphabet_power() {
        let x = SymbolString::from_letters(3, "aba").unwrap();
        let mut c = ColumnMultiset::initial(3);
        for j in 1..=3usize {
            c = c.advance(&x, 1 << 20).unwrap();
            assert_eq!(c.j(), j);
            assert_eq!(c.total_multiplicity(), BigUint::from(3u32).pow(j as u32));
        }
    }

    #[test]
    fn column_cap_is_enforced() {
        let x = SymbolString::from_letters(2, "abab").unwrap();
        let c = ColumnMultiset::initial(4);
        let c = c.advance(&x, 1 << 20).unwrap();
        assert!(matches!(
            c.advance(&x, 1),
            Err(Error::ResourceGuard(_))
        ));
    }

    #[test]
    fn weighted_uniform_mass_stays_one() {
        let x = SymbolString::from_letters(2, "ab").unwrap();
        let half = ExactRational::ratio(1, 2).unwrap();
        let row = vec![half.clone(), half];
        let mut c = WeightedColumnMultiset::initial(2);
        for _ in 0..2 {
            c = c.advance(&x, &row, 1 << 20).unwrap();
        }
        assert!(c.total_probability().is_one());
    }
}
