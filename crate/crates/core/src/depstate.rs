//! Depfactor-level analysis of an equation state: sup-sets, the structural
//! invariants, left-to-right numbering, and the potentials that bound the
//! encoded size.
//!
//! The input equation's symbols and their frozen input code lengths are the
//! reference frame: a basic position's weight never changes after parsing,
//! and similarity of depfactors means equality of the original symbol
//! strings at their position sets.

use std::collections::BTreeMap;

use crate::depfactor::{Depfactor, Side};
use crate::encoding::{build_huffman, CodeTable};
use crate::equation::Equation;
use crate::error::{Result, SolverError};
use crate::metrics::h;
use crate::symbol::{SymbolId, SymbolTable};

/// Frozen view of the freshly parsed equation: original symbols per
/// position and their input Huffman code lengths.
#[derive(Debug, Clone)]
pub struct InputInfo {
    sides: [Vec<SymbolId>; 2],
    weights: [Vec<u64>; 2],
    pub code: CodeTable,
    /// Total input bits over all positions, markers included.
    pub abs0: u64,
    /// Same with the four marker positions excluded.
    pub abs0_no_markers: u64,
}

impl InputInfo {
    /// Snapshots a freshly parsed equation. Every occurrence must still
    /// carry the basic depfactor of its own position.
    pub fn new(eq: &Equation, _table: &SymbolTable) -> Result<Self> {
        let mut freqs: BTreeMap<SymbolId, u64> = BTreeMap::new();
        for side in [Side::Lhs, Side::Rhs] {
            for (i, occ) in eq.side(side).iter().enumerate() {
                if !(occ.dep.is_basic() && occ.dep.min_pos() == i as u32 && occ.dep.side == side) {
                    return Err(SolverError::Invariant(
                        "input snapshot requires a freshly parsed equation".into(),
                    ));
                }
                *freqs.entry(occ.sym).or_insert(0) += 1;
            }
        }
        let code = build_huffman(&freqs)?;
        let mut sides: [Vec<SymbolId>; 2] = [Vec::new(), Vec::new()];
        let mut weights: [Vec<u64>; 2] = [Vec::new(), Vec::new()];
        let mut abs0 = 0;
        let mut abs0_no_markers = 0;
        for side in [Side::Lhs, Side::Rhs] {
            let idx = side_index(side);
            for occ in eq.side(side) {
                let w = code.len_of(occ.sym).unwrap() as u64;
                sides[idx].push(occ.sym);
                weights[idx].push(w);
                abs0 += w;
                if occ.sym != crate::symbol::MARKER {
                    abs0_no_markers += w;
                }
            }
        }
        Ok(InputInfo {
            sides,
            weights,
            code,
            abs0,
            abs0_no_markers,
        })
    }

    pub fn position_count(&self, side: Side) -> usize {
        self.sides[side_index(side)].len()
    }

    pub fn symbol_at(&self, side: Side, pos: u32) -> SymbolId {
        self.sides[side_index(side)][pos as usize]
    }

    /// Frozen weight of a basic position.
    pub fn weight(&self, side: Side, pos: u32) -> u64 {
        self.weights[side_index(side)][pos as usize]
    }

    /// Input code length of a symbol (used as the weight of variables).
    pub fn symbol_weight(&self, sym: SymbolId) -> u64 {
        self.code.len_of(sym).map(|l| l as u64).unwrap_or(0)
    }

    /// Sum of position weights of a depfactor.
    pub fn dep_weight(&self, dep: &Depfactor) -> u64 {
        dep.positions().map(|p| self.weight(dep.side, p)).sum()
    }

    /// Original symbol string spanned by a depfactor; equal keys mean
    /// similar depfactors.
    pub fn similarity_key(&self, dep: &Depfactor) -> Vec<SymbolId> {
        dep.positions()
            .map(|p| self.symbol_at(dep.side, p))
            .collect()
    }
}

pub fn side_index(side: Side) -> usize {
    match side {
        Side::Lhs => 0,
        Side::Rhs => 1,
    }
}

/// For each basic position: first and last occurrence index whose depfactor
/// contains it, and how many do.
#[derive(Debug, Clone)]
pub struct SupSets {
    data: [Vec<Option<(u32, u32, u32)>>; 2],
}

impl SupSets {
    pub fn get(&self, side: Side, pos: u32) -> Option<(u32, u32, u32)> {
        self.data[side_index(side)][pos as usize]
    }

    pub fn count(&self, side: Side, pos: u32) -> u64 {
        self.get(side, pos).map(|(_, _, c)| c as u64).unwrap_or(0)
    }
}

pub fn compute_sup(eq: &Equation, input: &InputInfo) -> SupSets {
    let mut data: [Vec<Option<(u32, u32, u32)>>; 2] = [
        vec![None; input.position_count(Side::Lhs)],
        vec![None; input.position_count(Side::Rhs)],
    ];
    for side in [Side::Lhs, Side::Rhs] {
        let slot = &mut data[side_index(side)];
        for (i, occ) in eq.side(side).iter().enumerate() {
            debug_assert_eq!(occ.dep.side, side);
            for p in occ.dep.positions() {
                let entry = &mut slot[p as usize];
                match entry {
                    None => *entry = Some((i as u32, i as u32, 1)),
                    Some((_, last, count)) => {
                        *last = i as u32;
                        *count += 1;
                    }
                }
            }
        }
    }
    SupSets { data }
}

/// Potentials of the current state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potentials {
    /// Sum over basic positions of weight times sup-set size (markers
    /// included); the depfactor-name part of the encoding bound.
    pub h_d: u64,
    /// Same with marker positions excluded.
    pub h_d_no_markers: u64,
    /// Sum over basic positions of `2 |sup| log2(|sup|+1)`; the
    /// index-number part of the encoding bound.
    pub h_n: f64,
    /// Exact bit size of the depfactor encoding: per occurrence, the
    /// weight of its depfactor plus `ceil(log2(k+1))` for its index within
    /// a class of size `k`.
    pub dep_encoding_bits: u64,
}

impl Potentials {
    pub fn h_total(&self) -> f64 {
        self.h_d as f64 + self.h_n
    }
}

pub fn compute_potentials(eq: &Equation, input: &InputInfo) -> Potentials {
    let sup = compute_sup(eq, input);
    let mut h_d = 0u64;
    let mut h_d_no_markers = 0u64;
    let mut h_n = 0f64;
    for side in [Side::Lhs, Side::Rhs] {
        let n = input.position_count(side);
        for pos in 0..n as u32 {
            let count = sup.count(side, pos);
            if count == 0 {
                continue;
            }
            let contribution = input.weight(side, pos) * count;
            h_d += contribution;
            if !(pos == 0 || pos == n as u32 - 1) {
                h_d_no_markers += contribution;
            }
            h_n += 2.0 * h(count);
        }
    }

    // exact encoding size needs class sizes
    let mut class_sizes: BTreeMap<(Side, &Depfactor), u64> = BTreeMap::new();
    for side in [Side::Lhs, Side::Rhs] {
        for occ in eq.side(side) {
            *class_sizes.entry((side, &occ.dep)).or_insert(0) += 1;
        }
    }
    let mut dep_encoding_bits = 0u64;
    for side in [Side::Lhs, Side::Rhs] {
        for occ in eq.side(side) {
            let k = class_sizes[&(side, &occ.dep)];
            let index_bits = 64 - (k).leading_zeros() as u64; // ceil(log2(k+1))
            dep_encoding_bits += input.dep_weight(&occ.dep) + index_bits;
        }
    }
    Potentials {
        h_d,
        h_d_no_markers,
        h_n,
        dep_encoding_bits,
    }
}

/// Left-to-right numbering of occurrences within their depfactor class.
/// Similar classes share the same class id, so their (id, index) tables
/// coincide.
pub fn assign_d_numbers(
    eq: &Equation,
    input: &InputInfo,
) -> BTreeMap<(Side, u32), (u32, u32)> {
    let mut key_ids: BTreeMap<Vec<SymbolId>, u32> = BTreeMap::new();
    let mut counters: BTreeMap<(Side, Depfactor), u32> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for side in [Side::Lhs, Side::Rhs] {
        for (i, occ) in eq.side(side).iter().enumerate() {
            let key = input.similarity_key(&occ.dep);
            let next_id = key_ids.len() as u32;
            let class_id = *key_ids.entry(key).or_insert(next_id);
            let counter = counters.entry((side, occ.dep.clone())).or_insert(0);
            *counter += 1;
            out.insert((side, i as u32), (class_id, *counter));
        }
    }
    out
}

/// Checks the structural depfactor invariants; returns human-readable
/// violations, empty when the state is consistent.
///
/// D1: sup-sets and depfactor classes are contiguous occurrence ranges.
/// D2: depfactors present on one side are pairwise comparable.
/// D3: similar classes carry identical symbol strings.
pub fn verify_invariants(eq: &Equation, input: &InputInfo, table: &SymbolTable) -> Vec<String> {
    let mut violations = Vec::new();
    let sup = compute_sup(eq, input);

    for side in [Side::Lhs, Side::Rhs] {
        for pos in 0..input.position_count(side) as u32 {
            if let Some((first, last, count)) = sup.get(side, pos) {
                if last - first + 1 != count {
                    violations.push(format!(
                        "D1: sup({} {pos}) spans [{first},{last}] but has {count} members",
                        side.name()
                    ));
                }
            }
        }
    }

    // classes: group occurrence indices by exact depfactor
    let mut classes: BTreeMap<(Side, Depfactor), Vec<u32>> = BTreeMap::new();
    for side in [Side::Lhs, Side::Rhs] {
        for (i, occ) in eq.side(side).iter().enumerate() {
            classes
                .entry((side, occ.dep.clone()))
                .or_default()
                .push(i as u32);
        }
    }
    for ((side, dep), indices) in &classes {
        let first = indices[0];
        let last = indices[indices.len() - 1];
        if last - first + 1 != indices.len() as u32 {
            violations.push(format!(
                "D1: class [{},{}] on {} is not contiguous",
                dep.min_pos(),
                dep.max_pos(),
                side.name()
            ));
        }
    }

    for side in [Side::Lhs, Side::Rhs] {
        let mut spans: Vec<(u32, u32)> = eq
            .side(side)
            .iter()
            .map(|occ| (occ.dep.min_pos(), occ.dep.max_pos()))
            .collect();
        spans.sort();
        for w in spans.windows(2) {
            if w[1].1 < w[0].1 {
                violations.push(format!(
                    "D2: incomparable depfactors [{},{}] and [{},{}] on {}",
                    w[0].0,
                    w[0].1,
                    w[1].0,
                    w[1].1,
                    side.name()
                ));
                break;
            }
        }
    }

    // D3: similar classes must agree pointwise on their symbols
    let mut by_key: BTreeMap<Vec<SymbolId>, Vec<(Side, Depfactor)>> = BTreeMap::new();
    for (side, dep) in classes.keys() {
        by_key
            .entry(input.similarity_key(dep))
            .or_default()
            .push((*side, dep.clone()));
    }
    for (key, group) in &by_key {
        if group.len() < 2 {
            continue;
        }
        let strings: Vec<Vec<SymbolId>> = group
            .iter()
            .map(|(side, dep)| {
                classes[&(*side, dep.clone())]
                    .iter()
                    .map(|&i| eq.side(*side)[i as usize].sym)
                    .collect()
            })
            .collect();
        for s in &strings[1..] {
            if s != &strings[0] {
                violations.push(format!(
                    "D3: similar classes over {:?} carry different symbol strings",
                    table.render(key)
                ));
                break;
            }
        }
    }

    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::parse_equation;

    fn setup(text: &str) -> (SymbolTable, Equation, InputInfo) {
        let mut table = SymbolTable::new();
        let eq = parse_equation(text, &mut table).unwrap();
        let input = InputInfo::new(&eq, &table).unwrap();
        (table, eq, input)
    }

    #[test]
    fn fresh_equation_has_singleton_sup_sets() {
        let (_, eq, input) = setup("aX=Xa");
        let sup = compute_sup(&eq, &input);
        for side in [Side::Lhs, Side::Rhs] {
            for pos in 0..input.position_count(side) as u32 {
                assert_eq!(sup.count(side, pos), 1);
            }
        }
    }

    #[test]
    fn fresh_potentials_match_input_size() {
        let (_, eq, input) = setup("abX=Xab");
        let pots = compute_potentials(&eq, &input);
        assert_eq!(pots.h_d, input.abs0);
        let positions = input.position_count(Side::Lhs) + input.position_count(Side::Rhs);
        assert!((pots.h_n - 2.0 * positions as f64).abs() < 1e-9);
        // every class is a singleton, so each occurrence pays weight + 1 bit
        assert_eq!(pots.dep_encoding_bits, input.abs0 + positions as u64);
    }

    #[test]
    fn occurrences_of_one_variable_are_similar_but_distinct() {
        let (_, eq, input) = setup("abX=Xab");
        let x_occs: Vec<&crate::equation::Occurrence> = eq
            .lhs
            .iter()
            .chain(eq.rhs.iter())
            .filter(|o| o.sym.0 > 0 && input.similarity_key(&o.dep).len() == 1)
            .collect();
        let lhs_x = &eq.lhs[3];
        let rhs_x = &eq.rhs[1];
        assert_ne!(lhs_x.dep, rhs_x.dep);
        assert_eq!(
            input.similarity_key(&lhs_x.dep),
            input.similarity_key(&rhs_x.dep)
        );
        drop(x_occs);
    }

    #[test]
    fn fresh_state_passes_invariants() {
        let (table, eq, input) = setup("abXY=YXba");
        assert!(verify_invariants(&eq, &input, &table).is_empty());
    }

    #[test]
    fn corrupted_state_is_reported() {
        let (table, mut eq, input) = setup("abc=cba");
        // swap two depfactors: the sup-sets stop being contiguous ranges
        let d1 = eq.lhs[1].dep.clone();
        let d3 = eq.lhs[3].dep.clone();
        eq.lhs[1].dep = d3;
        eq.lhs[3].dep = d1;
        let violations = verify_invariants(&eq, &input, &table);
        assert!(!violations.is_empty());
    }

    #[test]
    fn d_numbers_are_stable_and_shared_between_similar_classes() {
        let (_, eq, input) = setup("abX=Xab");
        let n1 = assign_d_numbers(&eq, &input);
        let n2 = assign_d_numbers(&eq, &input);
        assert_eq!(n1, n2);
        // the two X occurrences: similar singleton classes, same class id,
        // both numbered 1
        let lhs_x = n1[&(Side::Lhs, 3)];
        let rhs_x = n1[&(Side::Rhs, 1)];
        assert_eq!(lhs_x.0, rhs_x.0);
        assert_eq!(lhs_x.1, 1);
        assert_eq!(rhs_x.1, 1);
    }

    #[test]
    fn dep_weight_decomposition_matches_h_d() {
        let (_, eq, input) = setup("aabX=Xbaa");
        let pots = compute_potentials(&eq, &input);
        let direct: u64 = eq
            .lhs
            .iter()
            .chain(eq.rhs.iter())
            .map(|occ| input.dep_weight(&occ.dep))
            .sum();
        assert_eq!(direct, pots.h_d);
    }
}
