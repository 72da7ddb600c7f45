//! Huffman coding and bit-size measurement.
//!
//! The equation's letters are Huffman coded from their occurrence
//! frequencies; variables get a separate table so the pure letter quantity
//! stays recoverable in reports. Code assignment is canonical, so tables
//! are reproducible across runs and platforms.

use std::collections::{BTreeMap, BinaryHeap};

use crate::equation::Equation;
use crate::error::{Result, SolverError};
use crate::symbol::{SymbolId, SymbolKind, SymbolTable};

/// Prefix-free code table. Codes are stored little-endian in `bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeTable {
    codes: BTreeMap<SymbolId, (u64, u8)>,
}

impl CodeTable {
    pub fn len_of(&self, sym: SymbolId) -> Option<u8> {
        self.codes.get(&sym).map(|&(_, len)| len)
    }

    pub fn code_of(&self, sym: SymbolId) -> Option<(u64, u8)> {
        self.codes.get(&sym).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.codes.keys().copied()
    }

    pub fn code_string(&self, sym: SymbolId) -> Option<String> {
        self.codes.get(&sym).map(|&(bits, len)| {
            (0..len)
                .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
                .collect()
        })
    }

    /// Pairwise prefix check; quadratic, intended for tests.
    pub fn is_prefix_free(&self) -> bool {
        let entries: Vec<_> = self.codes.values().copied().collect();
        for (i, &(ca, la)) in entries.iter().enumerate() {
            for &(cb, lb) in entries.iter().skip(i + 1) {
                let l = la.min(lb);
                let mask = if l >= 64 { u64::MAX } else { (1u64 << l) - 1 };
                if ca & mask == cb & mask {
                    return false;
                }
            }
        }
        true
    }

    /// Kraft sum as (numerator, denominator 2^64-scaled) check: returns true
    /// iff the sum of 2^-len is at most 1.
    pub fn kraft_ok(&self) -> bool {
        let mut sum = 0u128;
        for &(_, len) in self.codes.values() {
            sum += 1u128 << (64 - len as u32);
        }
        sum <= 1u128 << 64
    }
}

/// Builds a Huffman code for the given frequencies. Ties in the tree
/// construction are broken by (count, creation index) with leaves inserted
/// in symbol-id order. A lone symbol receives the 1-bit code `0`.
pub fn build_huffman(freqs: &BTreeMap<SymbolId, u64>) -> Result<CodeTable> {
    let alive: Vec<(SymbolId, u64)> = freqs
        .iter()
        .filter(|&(_, &c)| c > 0)
        .map(|(&s, &c)| (s, c))
        .collect();
    if alive.is_empty() {
        return Err(SolverError::EmptyInput);
    }

    // depth per symbol via the usual two-smallest merge
    let mut lens: BTreeMap<SymbolId, u8> = BTreeMap::new();
    if alive.len() == 1 {
        lens.insert(alive[0].0, 1);
    } else {
        #[derive(PartialEq, Eq)]
        struct Node {
            count: u64,
            tie: u32,
            members: Vec<SymbolId>,
        }
        impl Ord for Node {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                // BinaryHeap is a max-heap; reverse for min-heap behaviour.
                (other.count, other.tie).cmp(&(self.count, self.tie))
            }
        }
        impl PartialOrd for Node {
            fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(other))
            }
        }
        let mut heap = BinaryHeap::new();
        let mut next_tie = 0u32;
        for &(sym, count) in &alive {
            heap.push(Node {
                count,
                tie: next_tie,
                members: vec![sym],
            });
            next_tie += 1;
        }
        while heap.len() > 1 {
            let a = heap.pop().unwrap();
            let b = heap.pop().unwrap();
            for &m in a.members.iter().chain(b.members.iter()) {
                *lens.entry(m).or_insert(0) += 1;
            }
            let mut members = a.members;
            members.extend(b.members);
            heap.push(Node {
                count: a.count + b.count,
                tie: next_tie,
                members,
            });
            next_tie += 1;
        }
    }

    // canonical assignment: sort by (len, symbol id)
    let mut order: Vec<(u8, SymbolId)> = lens.iter().map(|(&s, &l)| (l, s)).collect();
    order.sort();
    let mut codes = BTreeMap::new();
    let mut code = 0u64;
    let mut prev_len = 0u8;
    for (len, sym) in order {
        assert!(len <= 64, "code length out of range");
        code <<= len - prev_len;
        // store reversed so that reading LSB-first walks the tree root-down
        let mut stored = 0u64;
        for i in 0..len {
            if code >> i & 1 == 1 {
                stored |= 1 << (len - 1 - i);
            }
        }
        codes.insert(sym, (stored, len));
        code += 1;
        prev_len = len;
    }
    Ok(CodeTable { codes })
}

/// Sum of code lengths over a symbol string.
pub fn encoded_len(syms: &[SymbolId], table: &CodeTable) -> Result<u64> {
    let mut total = 0u64;
    for &s in syms {
        let len = table
            .len_of(s)
            .ok_or_else(|| SolverError::MissingCode(format!("{}", s.0)))?;
        total += len as u64;
    }
    Ok(total)
}

/// Occurrence frequencies of the equation's symbols, split by kind.
/// Markers are excluded throughout.
pub fn equation_frequencies(
    eq: &Equation,
    table: &SymbolTable,
) -> (BTreeMap<SymbolId, u64>, BTreeMap<SymbolId, u64>) {
    let mut letters: BTreeMap<SymbolId, u64> = BTreeMap::new();
    let mut variables: BTreeMap<SymbolId, u64> = BTreeMap::new();
    for occ in eq.lhs.iter().chain(eq.rhs.iter()) {
        match table.kind(occ.sym) {
            SymbolKind::Letter => *letters.entry(occ.sym).or_insert(0) += 1,
            SymbolKind::Variable => *variables.entry(occ.sym).or_insert(0) += 1,
            SymbolKind::EndMarker => {}
        }
    }
    (letters, variables)
}

/// Current Huffman tables for an equation, rebuilt from scratch.
#[derive(Debug, Clone)]
pub struct EquationCodes {
    pub letters: Option<CodeTable>,
    pub variables: Option<CodeTable>,
    pub letter_bits: u64,
    pub variable_bits: u64,
}

impl EquationCodes {
    pub fn total_bits(&self) -> u64 {
        self.letter_bits + self.variable_bits
    }
}

/// Rebuilds the letter and variable tables after a rewrite step and
/// measures the encoded size of the current equation.
pub fn rebuild_after_step(eq: &Equation, table: &SymbolTable) -> Result<EquationCodes> {
    let (letter_freqs, var_freqs) = equation_frequencies(eq, table);
    let letters = if letter_freqs.is_empty() {
        None
    } else {
        Some(build_huffman(&letter_freqs)?)
    };
    let variables = if var_freqs.is_empty() {
        None
    } else {
        Some(build_huffman(&var_freqs)?)
    };
    let mut letter_bits = 0u64;
    if let Some(t) = &letters {
        for (&s, &c) in &letter_freqs {
            letter_bits += t.len_of(s).unwrap() as u64 * c;
        }
    }
    let mut variable_bits = 0u64;
    if let Some(t) = &variables {
        for (&s, &c) in &var_freqs {
            variable_bits += t.len_of(s).unwrap() as u64 * c;
        }
    }
    Ok(EquationCodes {
        letters,
        variables,
        letter_bits,
        variable_bits,
    })
}

/// Total bits of the frequency multiset under a fixed-length code over `m`
/// distinct symbols; the baseline the Huffman total is compared against.
pub fn fixed_length_total(freqs: &BTreeMap<SymbolId, u64>) -> u64 {
    let m = freqs.iter().filter(|&(_, &c)| c > 0).count() as u64;
    if m == 0 {
        return 0;
    }
    let width = (64 - (m - 1).leading_zeros()).max(1) as u64;
    width * freqs.values().sum::<u64>()
}

/// Total bits under a per-symbol code table applied to a frequency map.
pub fn total_under(table: &CodeTable, freqs: &BTreeMap<SymbolId, u64>) -> Result<u64> {
    let mut total = 0;
    for (&s, &c) in freqs.iter().filter(|&(_, &c)| c > 0) {
        let len = table
            .len_of(s)
            .ok_or_else(|| SolverError::MissingCode(format!("{}", s.0)))?;
        total += len as u64 * c;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn freqs(pairs: &[(u32, u64)]) -> BTreeMap<SymbolId, u64> {
        pairs.iter().map(|&(s, c)| (SymbolId(s), c)).collect()
    }

    #[test]
    fn two_symbols_get_one_bit_each() {
        let t = build_huffman(&freqs(&[(1, 1), (2, 1)])).unwrap();
        assert_eq!(t.len_of(SymbolId(1)), Some(1));
        assert_eq!(t.len_of(SymbolId(2)), Some(1));
        assert!(t.is_prefix_free());
    }

    #[test]
    fn skewed_frequencies() {
        // counts 5, 2, 1: code lengths 1, 2, 2; multiset total 5+4+2 = 11
        let f = freqs(&[(1, 5), (2, 2), (3, 1)]);
        let t = build_huffman(&f).unwrap();
        assert_eq!(t.len_of(SymbolId(1)), Some(1));
        assert_eq!(t.len_of(SymbolId(2)), Some(2));
        assert_eq!(t.len_of(SymbolId(3)), Some(2));
        assert_eq!(total_under(&t, &f).unwrap(), 11);
        assert!(t.is_prefix_free());
        assert!(t.kraft_ok());
    }

    #[test]
    fn singleton_symbol_gets_one_bit() {
        let f = freqs(&[(7, 7)]);
        let t = build_huffman(&f).unwrap();
        assert_eq!(t.len_of(SymbolId(7)), Some(1));
        assert_eq!(t.code_string(SymbolId(7)).unwrap(), "0");
        assert_eq!(total_under(&t, &f).unwrap(), 7);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            build_huffman(&BTreeMap::new()),
            Err(SolverError::EmptyInput)
        ));
        assert!(matches!(
            build_huffman(&freqs(&[(1, 0)])),
            Err(SolverError::EmptyInput)
        ));
    }

    #[test]
    fn deterministic_on_ties() {
        let f = freqs(&[(1, 1), (2, 1), (3, 1), (4, 1)]);
        let a = build_huffman(&f).unwrap();
        let b = build_huffman(&f).unwrap();
        assert_eq!(a, b);
        for s in 1..=4 {
            assert_eq!(a.len_of(SymbolId(s)), Some(2));
        }
    }

    #[test]
    fn huffman_beats_fixed_length() {
        let f = freqs(&[(1, 100), (2, 3), (3, 2), (4, 1), (5, 1)]);
        let t = build_huffman(&f).unwrap();
        assert!(total_under(&t, &f).unwrap() <= fixed_length_total(&f));
    }
}
