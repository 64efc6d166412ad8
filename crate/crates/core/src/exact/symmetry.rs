use crate::string::SymbolString;
use num_bigint::BigUint;
use num_traits::One;

/// An orbit of strings under symbol permutations and reversal, given by
/// its canonical representative and its size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    pub representative: SymbolString,
    pub size: BigUint,
}

/// Canonical representative of the orbit of `x` under symbol
/// permutations and reversal: the lexicographically smaller of the
/// first-occurrence relabelings of `x` and of its reversal.
pub fn canonicalize(x: &SymbolString) -> SymbolString {
    let fwd = x.occurrence_pattern();
    let bwd = x.reversed().occurrence_pattern();
    if fwd.symbols() <= bwd.symbols() {
        fwd
    } else {
        bwd
    }
}

pub(crate) fn falling_factorial(k: u64, m: usize) -> BigUint {
    let mut out = BigUint::one();
    for i in 0..m as u64 {
        out *= k - i;
    }
    out
}

/// Streams the equivalence classes of `k`-ary strings of length `n`.
///
/// Candidates are generated as restricted-growth strings (first symbol 0,
/// each later symbol at most one above the running maximum), which are
/// exactly the first-occurrence relabelings; the reversal symmetry is
/// then applied as a filter. Class sizes count the labelings of the
/// pattern, doubled when the orbit contains the reversal as a distinct
/// pattern, and they add up to `k^n`.
pub struct ClassIter {
    k: u64,
    n: usize,
    prefix: Vec<u64>,
    maxes: Vec<u64>,
    cand: Vec<u64>,
    depth: usize,
    done: bool,
}

impl ClassIter {
    pub(crate) fn new(k: u64, n: usize) -> ClassIter {
        ClassIter {
            k,
            n,
            prefix: vec![0; n],
            maxes: vec![0; n],
            cand: vec![0; n + 1],
            depth: 0,
            done: false,
        }
    }

    fn backtrack(&mut self) {
        if self.depth == 0 {
            self.done = true;
        } else {
            self.depth -= 1;
        }
    }

    fn emit(&self) -> Option<EquivalenceClass> {
        let pattern = &self.prefix[..self.n];
        let reversed = SymbolString::from_raw(self.k, pattern.iter().rev().copied().collect());
        let reversed_pattern = reversed.occurrence_pattern();
        if pattern > reversed_pattern.symbols() {
            return None;
        }
        let m = if self.n == 0 {
            0
        } else {
            self.maxes[self.n - 1] as usize + 1
        };
        let mut size = falling_factorial(self.k, m);
        if reversed_pattern.symbols() != pattern {
            size *= 2u32;
        }
        Some(EquivalenceClass {
            representative: SymbolString::from_raw(self.k, pattern.to_vec()),
            size,
        })
    }
}

impl Iterator for ClassIter {
    type Item = EquivalenceClass;

    fn next(&mut self) -> Option<EquivalenceClass> {
        while !self.done {
            if self.depth == self.n {
                let out = self.emit();
                self.backtrack();
                if out.is_some() {
                    return out;
                }
                continue;
            }
            let limit = if self.depth == 0 {
                0
            } else {
                (self.maxes[self.depth - 1] + 1).min(self.k - 1)
            };
            let c = self.cand[self.depth];
            if c > limit {
                self.backtrack();
                continue;
            }
            self.cand[self.depth] = c + 1;
            self.prefix[self.depth] = c;
            self.maxes[self.depth] = if self.depth == 0 {
                c
            } else {
                self.maxes[self.depth - 1].max(c)
            };
            self.depth += 1;
            if self.depth < self.n {
                self.cand[self.depth] = 0;
            }
        }
        None
    }
}
