use crate::error::{Error, Result};
use crate::string::SymbolString;

/// One column of the edit-distance matrix against a fixed string `x`,
/// stored as its top value plus the vector of successive differences.
///
/// For the matrix `M` of `x` against a prefix `y[..j]`, column `j` is
/// `(M[0][j], ..., M[n][j])` with `n = |x|`. Its top entry is always `j`
/// and neighboring entries differ by -1, 0, or +1, so the column is
/// determined by `base = j` and `n` ternary deltas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DPColumn {
    base: usize,
    deltas: Vec<i8>,
}

impl DPColumn {
    /// Column 0 against a string of length `n`: values `0, 1, ..., n`.
    pub fn initial(n: usize) -> DPColumn {
        DPColumn {
            base: 0,
            deltas: vec![1; n],
        }
    }

    /// Builds a column from parts, rejecting deltas outside `{-1, 0, 1}`
    /// and delta vectors that would drive an entry negative.
    pub fn new(base: usize, deltas: Vec<i8>) -> Result<DPColumn> {
        let mut value = base as i64;
        for &d in &deltas {
            if !(-1..=1).contains(&d) {
                return Err(Error::domain(format!("column delta {d} outside -1..=1")));
            }
            value += d as i64;
            if value < 0 {
                return Err(Error::domain("column with negative entry"));
            }
        }
        Ok(DPColumn { base, deltas })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn n(&self) -> usize {
        self.deltas.len()
    }

    pub fn deltas(&self) -> &[i8] {
        &self.deltas
    }

    /// Reconstructs the explicit values `(M[0][j], ..., M[n][j])`.
    pub fn values(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.deltas.len() + 1);
        let mut v = self.base as i64;
        out.push(v as u32);
        for &d in &self.deltas {
            v += d as i64;
            out.push(v as u32);
        }
        out
    }

    pub(crate) fn from_values(values: &[u32]) -> DPColumn {
        let deltas = values
            .windows(2)
            .map(|w| (w[1] as i64 - w[0] as i64) as i8)
            .collect();
        DPColumn {
            base: values[0] as usize,
            deltas,
        }
    }
}

/// Extends a column one step: from the column of `x` against `y[..j-1]`
/// to the column against `y[..j-1]` followed by symbol `b`.
pub fn next_column(x: &SymbolString, col: &DPColumn, j: usize, b: u64) -> Result<DPColumn> {
    if b >= x.k() {
        return Err(Error::SymbolOutOfRange { symbol: b, k: x.k() });
    }
    if col.n() != x.len() {
        return Err(Error::LengthMismatch(col.n(), x.len()));
    }
    if j == 0 || col.base() != j - 1 {
        return Err(Error::domain(format!(
            "column has base {} but was advanced to index {j}",
            col.base()
        )));
    }
    let prev = col.values();
    let mut next = vec![0u32; prev.len()];
    advance_values(x.symbols(), &prev, &mut next, j as u32, b);
    Ok(DPColumn::from_values(&next))
}

/// The DP step shared by the column type and the multiset sweeps: fills
/// `next` from `prev` for appended symbol `b`, where `next[0] = j`.
pub(crate) fn advance_values(xs: &[u64], prev: &[u32], next: &mut [u32], j: u32, b: u64) {
    next[0] = j;
    for i in 1..prev.len() {
        let sub = prev[i - 1] + u32::from(xs[i - 1] != b);
        let del = prev[i] + 1;
        let ins = next[i - 1] + 1;
        next[i] = sub.min(del).min(ins);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_column_counts_up() {
        let c = DPColumn::initial(3);
        assert_eq!(c.values(), vec![0, 1, 2, 3]);
        assert_eq!(c.base(), 0);
    }

    #[test]
    fn advance_matches_worked_example() {
        let x = SymbolString::from_letters(3, "ab").unwrap();
        let c0 = DPColumn::initial(2);
        let next_a = next_column(&x, &c0, 1, 0).unwrap();
        assert_eq!(next_a.values(), vec![1, 0, 1]);
        let next_b = next_column(&x, &c0, 1, 1).unwrap();
        assert_eq!(next_b.values(), vec![1, 1, 1]);
    }

    #[test]
    fn rejects_inconsistent_inputs() {
        let x = SymbolString::from_letters(3, "ab").unwrap();
        let c0 = DPColumn::initial(2);
        assert!(next_column(&x, &c0, 2, 0).is_err());
        assert!(next_column(&x, &c0, 1, 5).is_err());
        let short = DPColumn::initial(1);
        assert!(next_column(&x, &short, 1, 0).is_err());
        assert!(DPColumn::new(0, vec![2]).is_err());
        assert!(DPColumn::new(0, vec![-1]).is_err());
    }
}
