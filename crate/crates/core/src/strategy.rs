//! Partition-choice strategy: blocking classification and the four sums it
//! drives.
//!
//! A variable side is blocked once its image is down to one letter or a new
//! letter sits first or second from that side; a basic position is blocked
//! on a side once at most one letter remains beyond its sup-set span or a
//! new letter sits within two places of it. Blocked sides stay blocked for
//! the rest of the phase, which is what makes halving the sums meaningful.

use std::collections::{BTreeMap, BTreeSet};

use crate::config::NewLetterMode;
use crate::depfactor::Side;
use crate::depstate::{compute_sup, side_index, InputInfo};
use crate::equation::{Equation, Substitution};
use crate::error::{Result, SolverError};
use crate::recompress::{CoverageState, Partition};
use crate::symbol::{SymbolId, SymbolOrigin, SymbolTable};

/// One side of the equation expanded under the shadow solution, with
/// per-letter provenance and the span of every equation occurrence.
pub struct SigmaSide {
    pub letters: Vec<SymbolId>,
    pub is_new: Vec<bool>,
    /// `occ_start[i]..occ_start[i+1]` is the span of occurrence `i`;
    /// markers and removed-image variables span zero letters.
    pub occ_start: Vec<usize>,
}

pub fn is_new_letter(
    sym: SymbolId,
    gamma: &BTreeSet<SymbolId>,
    mode: NewLetterMode,
    phase: u32,
    table: &SymbolTable,
) -> bool {
    match mode {
        NewLetterMode::OutsideGamma => !gamma.contains(&sym),
        NewLetterMode::PairFreshOnly => table.origin(sym) == SymbolOrigin::PairFresh(phase),
    }
}

pub fn materialize_with_provenance(
    occs: &[crate::equation::Occurrence],
    sub: &Substitution,
    gamma: &BTreeSet<SymbolId>,
    mode: NewLetterMode,
    phase: u32,
    table: &SymbolTable,
) -> Result<SigmaSide> {
    let mut letters = Vec::new();
    let mut is_new = Vec::new();
    let mut occ_start = Vec::with_capacity(occs.len() + 1);
    for occ in occs {
        occ_start.push(letters.len());
        if table.is_marker(occ.sym) {
            continue;
        }
        if table.is_variable(occ.sym) {
            let image = sub
                .get(occ.sym)
                .ok_or_else(|| SolverError::MissingVariable(table.display(occ.sym).to_string()))?;
            for &s in image {
                letters.push(s);
                is_new.push(is_new_letter(s, gamma, mode, phase, table));
            }
        } else {
            letters.push(occ.sym);
            is_new.push(is_new_letter(occ.sym, gamma, mode, phase, table));
        }
    }
    occ_start.push(letters.len());
    Ok(SigmaSide {
        letters,
        is_new,
        occ_start,
    })
}

/// Blocked flags for every variable side and every basic-position side.
/// Positions whose sup-set vanished entirely count as blocked on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockFlags {
    pub var_left: BTreeMap<SymbolId, bool>,
    pub var_right: BTreeMap<SymbolId, bool>,
    pub pos_left: [Vec<bool>; 2],
    pub pos_right: [Vec<bool>; 2],
}

impl BlockFlags {
    /// Checks that no flag cleared relative to an earlier classification.
    pub fn assert_monotone_from(&self, earlier: &BlockFlags) -> Result<()> {
        for (var, &was) in &earlier.var_left {
            if was && !self.var_left.get(var).copied().unwrap_or(true) {
                return Err(SolverError::Invariant(format!(
                    "left-blocked flag cleared on variable {}",
                    var.0
                )));
            }
        }
        for (var, &was) in &earlier.var_right {
            if was && !self.var_right.get(var).copied().unwrap_or(true) {
                return Err(SolverError::Invariant(format!(
                    "right-blocked flag cleared on variable {}",
                    var.0
                )));
            }
        }
        for side in 0..2 {
            for (pos, (&was_l, &is_l)) in earlier.pos_left[side]
                .iter()
                .zip(self.pos_left[side].iter())
                .enumerate()
            {
                if was_l && !is_l {
                    return Err(SolverError::Invariant(format!(
                        "left-blocked flag cleared on position {pos}"
                    )));
                }
            }
            for (pos, (&was_r, &is_r)) in earlier.pos_right[side]
                .iter()
                .zip(self.pos_right[side].iter())
                .enumerate()
            {
                if was_r && !is_r {
                    return Err(SolverError::Invariant(format!(
                        "right-blocked flag cleared on position {pos}"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn classify(
    eq: &Equation,
    sub: &Substitution,
    gamma: &BTreeSet<SymbolId>,
    input: &InputInfo,
    mode: NewLetterMode,
    phase: u32,
    table: &SymbolTable,
) -> Result<BlockFlags> {
    let mut var_left = BTreeMap::new();
    let mut var_right = BTreeMap::new();
    for var in eq.variables() {
        let image = sub
            .get(var)
            .ok_or_else(|| SolverError::MissingVariable(table.display(var).to_string()))?;
        if image.len() <= 1 {
            var_left.insert(var, true);
            var_right.insert(var, true);
            continue;
        }
        let new_at = |i: usize| is_new_letter(image[i], gamma, mode, phase, table);
        var_left.insert(var, new_at(0) || new_at(1));
        let n = image.len();
        var_right.insert(var, new_at(n - 1) || new_at(n - 2));
    }

    let sup = compute_sup(eq, input);
    let mut pos_left: [Vec<bool>; 2] = [Vec::new(), Vec::new()];
    let mut pos_right: [Vec<bool>; 2] = [Vec::new(), Vec::new()];
    for side in [Side::Lhs, Side::Rhs] {
        let sigma = materialize_with_provenance(eq.side(side), sub, gamma, mode, phase, table)?;
        let total = sigma.letters.len();
        let n = input.position_count(side);
        let idx = side_index(side);
        pos_left[idx] = vec![true; n];
        pos_right[idx] = vec![true; n];
        for pos in 0..n as u32 {
            let Some((first, last, _)) = sup.get(side, pos) else {
                continue; // vanished sup-set: blocked on both sides
            };
            let span_start = sigma.occ_start[first as usize];
            let span_end = sigma.occ_start[last as usize + 1];
            let left_blocked = span_start <= 1
                || sigma.is_new[span_start - 1]
                || sigma.is_new[span_start - 2];
            let right = total - span_end;
            let right_blocked =
                right <= 1 || sigma.is_new[span_end] || sigma.is_new[span_end + 1];
            pos_left[idx][pos as usize] = left_blocked;
            pos_right[idx][pos as usize] = right_blocked;
        }
    }
    Ok(BlockFlags {
        var_left,
        var_right,
        pos_left,
        pos_right,
    })
}

/// The four strategy sums, cycled through as halving targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StrategySums {
    /// Weighted variable mass over unblocked sides.
    pub a: u64,
    /// Weighted basic-depfactor mass over unblocked sides.
    pub b: u64,
    /// Variable occurrence count over unblocked sides.
    pub c: u64,
    /// Number of unblocked basic-depfactor sides.
    pub d: u64,
}

impl StrategySums {
    pub fn get(&self, target: Target) -> u64 {
        match target {
            Target::A => self.a,
            Target::B => self.b,
            Target::C => self.c,
            Target::D => self.d,
        }
    }
}

pub fn compute_sums(flags: &BlockFlags, eq: &Equation, input: &InputInfo) -> StrategySums {
    let mut sums = StrategySums::default();
    for var in eq.variables() {
        let n = eq.occurrence_count(var) as u64;
        let w = input.symbol_weight(var);
        if !flags.var_left.get(&var).copied().unwrap_or(true) {
            sums.a += n * w;
            sums.c += n;
        }
        if !flags.var_right.get(&var).copied().unwrap_or(true) {
            sums.a += n * w;
            sums.c += n;
        }
    }
    for side in [Side::Lhs, Side::Rhs] {
        let idx = side_index(side);
        for pos in 0..input.position_count(side) as u32 {
            let w = input.weight(side, pos);
            if !flags.pos_left[idx][pos as usize] {
                sums.b += w;
                sums.d += 1;
            }
            if !flags.pos_right[idx][pos as usize] {
                sums.b += w;
                sums.d += 1;
            }
        }
    }
    sums
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    A,
    B,
    C,
    D,
}

/// Cycles a -> b -> c -> d -> a, advanced once per partition step.
#[derive(Debug, Clone, Default)]
pub struct TargetCycle {
    idx: usize,
}

impl TargetCycle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next(&mut self) -> Target {
        let t = [Target::A, Target::B, Target::C, Target::D][self.idx % 4];
        self.idx += 1;
        t
    }
}

/// Coverage fallback once the targeted sums are all zero: seed with the
/// first uncovered pair, then place each remaining letter greedily on the
/// side that covers more of what is still open.
pub fn greedy_coverage_partition(
    gamma_sorted: &[SymbolId],
    coverage: &CoverageState,
) -> Result<Partition> {
    let Some((seed_left, seed_right)) = coverage.first_uncovered() else {
        return Err(SolverError::Invariant(
            "coverage partition requested with nothing uncovered".into(),
        ));
    };
    let mut left: BTreeSet<SymbolId> = [seed_left].into();
    let mut right: BTreeSet<SymbolId> = [seed_right].into();
    let uncovered: BTreeSet<(SymbolId, SymbolId)> = coverage.uncovered().collect();
    for &sym in gamma_sorted {
        if sym == seed_left || sym == seed_right {
            continue;
        }
        let gain_left: usize = right
            .iter()
            .filter(|&&r| uncovered.contains(&(sym, r)))
            .count();
        let gain_right: usize = left
            .iter()
            .filter(|&&l| uncovered.contains(&(l, sym)))
            .count();
        if gain_right > gain_left {
            right.insert(sym);
        } else {
            left.insert(sym);
        }
    }
    Partition::new(left, right)
}
