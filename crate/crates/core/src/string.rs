use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A string over the alphabet `{0, 1, ..., k-1}`.
///
/// The alphabet size `k` travels with the string so that operations on
/// pairs can reject mixed-alphabet inputs. The empty string is valid.
///
/// ```
/// use edconst::SymbolString;
///
/// let x = SymbolString::new(2, vec![0, 1, 0]).unwrap();
/// assert_eq!(x.len(), 3);
/// assert_eq!(x.reversed().symbols(), &[0, 1, 0]);
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymbolString {
    k: u64,
    symbols: Vec<u64>,
}

impl SymbolString {
    /// Builds a string, checking that `k >= 2` and every symbol is below `k`.
    pub fn new(k: u64, symbols: Vec<u64>) -> Result<Self> {
        if k < 2 {
            return Err(Error::AlphabetTooSmall(k));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s >= k) {
            return Err(Error::SymbolOutOfRange { symbol: s, k });
        }
        Ok(SymbolString { k, symbols })
    }

    /// The empty string over a `k`-ary alphabet.
    pub fn empty(k: u64) -> Result<Self> {
        Self::new(k, Vec::new())
    }

    /// Convenience constructor mapping `'a'..='z'` to `0..=25` and
    /// `'0'..='9'` to `0..=9`. Intended for tests and examples.
    pub fn from_letters(k: u64, s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| match c {
                'a'..='z' => Ok(c as u64 - 'a' as u64),
                '0'..='9' => Ok(c as u64 - '0' as u64),
                other => Err(Error::domain(format!("unsupported letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, symbols)
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u64] {
        &self.symbols
    }

    pub fn reversed(&self) -> SymbolString {
        let mut symbols = self.symbols.clone();
        symbols.reverse();
        SymbolString { k: self.k, symbols }
    }

    /// Relabels symbols by order of first occurrence, so the result starts
    /// with 0 and introduces each new value as the next unused one.
    /// `[2, 2, 0, 2, 1]` becomes `[0, 0, 1, 0, 2]`.
    pub fn occurrence_pattern(&self) -> SymbolString {
        let mut map = std::collections::HashMap::new();
        let mut next = 0u64;
        let symbols = self
            .symbols
            .iter()
            .map(|&s| {
                *map.entry(s).or_insert_with(|| {
                    let v = next;
                    next += 1;
                    v
                })
            })
            .collect();
        SymbolString { k: self.k, symbols }
    }

    /// Number of distinct symbols actually used.
    pub fn distinct_symbols(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        self.symbols.iter().filter(|s| seen.insert(**s)).count()
    }

    pub(crate) fn from_raw(k: u64, symbols: Vec<u64>) -> SymbolString {
        debug_assert!(k >= 2 && symbols.iter().all(|&s| s < k));
        SymbolString { k, symbols }
    }
}

impl std::fmt::Display for SymbolString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for s in &self.symbols {
            if !first {
                write!(f, ".")?;
            }
            write!(f, "{s}")?;
            first = false;
        }
        Ok(())
    }
}
