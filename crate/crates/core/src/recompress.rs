//! The compression kernel: block and pair compression on strings and on
//! equations, letter popping, and depfactor extension.
//!
//! A phase snapshots the current alphabet, pops block prefixes/suffixes and
//! compresses all blocks, then repeats pair popping and pair compression
//! under chosen partitions until every ordered pair of distinct phase-start
//! letters has been covered. Depfactor extension runs immediately before
//! each compression; the extension functions report which basic positions
//! spread to new occurrence units so the caller can maintain its counters.

use std::collections::{BTreeMap, BTreeSet};

use crate::depfactor::{Depfactor, Side};
use crate::derivation::{DerivationLog, PopSide, Record};
use crate::equation::{Equation, Occurrence};
use crate::error::{Result, SolverError};
use crate::symbol::{SymbolId, SymbolTable};

/// Disjoint split of (a subset of) the phase-start alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub left: BTreeSet<SymbolId>,
    pub right: BTreeSet<SymbolId>,
}

impl Partition {
    pub fn new(left: BTreeSet<SymbolId>, right: BTreeSet<SymbolId>) -> Result<Self> {
        if !left.is_disjoint(&right) {
            return Err(SolverError::PartitionNotDisjoint);
        }
        Ok(Partition { left, right })
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        let fmt = |set: &BTreeSet<SymbolId>| {
            set.iter()
                .map(|&s| table.display(s).to_string())
                .collect::<Vec<_>>()
                .join("")
        };
        format!("({{{}}},{{{}}})", fmt(&self.left), fmt(&self.right))
    }
}

/// Ordered distinct letter pairs of the phase-start alphabet not yet
/// covered by an applied partition.
#[derive(Debug, Clone)]
pub struct CoverageState {
    uncovered: BTreeSet<(SymbolId, SymbolId)>,
}

impl CoverageState {
    pub fn new(gamma: &BTreeSet<SymbolId>) -> Self {
        let mut uncovered = BTreeSet::new();
        for &a in gamma {
            for &b in gamma {
                if a != b {
                    uncovered.insert((a, b));
                }
            }
        }
        CoverageState { uncovered }
    }

    pub fn cover(&mut self, p: &Partition) {
        for &a in &p.left {
            for &b in &p.right {
                self.uncovered.remove(&(a, b));
            }
        }
    }

    pub fn is_complete(&self) -> bool {
        self.uncovered.is_empty()
    }

    pub fn remaining(&self) -> usize {
        self.uncovered.len()
    }

    pub fn first_uncovered(&self) -> Option<(SymbolId, SymbolId)> {
        self.uncovered.iter().next().copied()
    }

    pub fn uncovered(&self) -> impl Iterator<Item = (SymbolId, SymbolId)> + '_ {
        self.uncovered.iter().copied()
    }
}

/// Per-variable guess for the block-popping stage: the image is
/// `first^prefix_len  w  b^r` with `suffix = Some((b, r))`, or `first^prefix_len`
/// with no suffix; `becomes_empty` states that nothing remains after the pops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPopGuess {
    pub first: SymbolId,
    pub prefix_len: u64,
    pub suffix: Option<(SymbolId, u64)>,
    pub becomes_empty: bool,
}

/// Per-variable guess for one pair-compression round: pop the first letter
/// when it lies in the right class, the last when it lies in the left class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairPopGuess {
    pub left: Option<SymbolId>,
    pub right: Option<SymbolId>,
    pub becomes_empty: bool,
}

/// Basic positions that spread to new occurrence units during a depfactor
/// extension; one element per (position, unit entered).
pub type ExtensionReport = Vec<(Side, u32)>;

/// Removes a variable whose image is empty.
pub fn remove_variable(eq: &mut Equation, var: SymbolId, phase: u32, log: &mut DerivationLog) {
    for side in [Side::Lhs, Side::Rhs] {
        eq.side_mut(side).retain(|occ| occ.sym != var);
    }
    eq.set_occurrence_count(var, 0);
    log.push(Record::Removed { var, phase });
}

/// Replaces every occurrence of each guessed variable `X` by
/// `a^l X b^r` (without `X` when the image becomes empty). Popped letters
/// receive the basic depfactor of the occurrence of `X` they came from.
pub fn pop_blocks(
    eq: &mut Equation,
    guesses: &BTreeMap<SymbolId, BlockPopGuess>,
    phase: u32,
    table: &SymbolTable,
    log: &mut DerivationLog,
) -> Result<()> {
    for (&var, g) in guesses {
        if !table.is_variable(var) {
            return Err(SolverError::InconsistentGuess(format!(
                "{} is not a variable",
                table.display(var)
            )));
        }
        if g.prefix_len == 0 {
            return Err(SolverError::InconsistentGuess(
                "block pop needs a prefix of length at least 1".into(),
            ));
        }
        if !table.is_letter(g.first) {
            return Err(SolverError::InconsistentGuess("popped prefix is not a letter".into()));
        }
        if let Some((b, r)) = g.suffix {
            if r == 0 {
                return Err(SolverError::InconsistentGuess(
                    "suffix pop must have positive length".into(),
                ));
            }
            if !table.is_letter(b) {
                return Err(SolverError::InconsistentGuess("popped suffix is not a letter".into()));
            }
        }
        if eq.occurrence_count(var) == 0 {
            return Err(SolverError::InconsistentGuess(format!(
                "{} does not occur",
                table.display(var)
            )));
        }
    }

    for side in [Side::Lhs, Side::Rhs] {
        let old = std::mem::take(eq.side_mut(side));
        let mut new = Vec::with_capacity(old.len());
        for occ in old {
            let Some(g) = guesses.get(&occ.sym) else {
                new.push(occ);
                continue;
            };
            debug_assert!(occ.dep.is_basic(), "variable depfactor must stay basic");
            for _ in 0..g.prefix_len {
                new.push(Occurrence {
                    sym: g.first,
                    dep: occ.dep.clone(),
                });
            }
            if !g.becomes_empty {
                new.push(occ.clone());
            }
            if let Some((b, r)) = g.suffix {
                for _ in 0..r {
                    new.push(Occurrence {
                        sym: b,
                        dep: occ.dep.clone(),
                    });
                }
            }
        }
        *eq.side_mut(side) = new;
    }

    for (&var, g) in guesses {
        log.push(Record::Pop {
            var,
            side: PopSide::Left,
            letters: vec![g.first; g.prefix_len as usize],
            phase,
        });
        if let Some((b, r)) = g.suffix {
            log.push(Record::Pop {
                var,
                side: PopSide::Right,
                letters: vec![b; r as usize],
                phase,
            });
        }
        if g.becomes_empty {
            eq.set_occurrence_count(var, 0);
            log.push(Record::Removed { var, phase });
        }
    }
    Ok(())
}

/// Depfactor extension before block compression: every maximal run of
/// `gamma` letters (runs of length 1 included) absorbs its own letters'
/// depfactors plus those of both neighbouring occurrences. Neighbour reads
/// are snapshotted, so the pass order over runs does not matter.
fn extend_for_block(
    eq: &mut Equation,
    gamma: &BTreeSet<SymbolId>,
    table: &SymbolTable,
) -> Result<ExtensionReport> {
    let mut report = Vec::new();
    for side in [Side::Lhs, Side::Rhs] {
        let occs = eq.side(side);
        let mut updates: Vec<(usize, usize, Depfactor)> = Vec::new();
        let mut i = 0;
        while i < occs.len() {
            let sym = occs[i].sym;
            if !(table.is_letter(sym) && gamma.contains(&sym)) {
                i += 1;
                continue;
            }
            let mut j = i;
            while j + 1 < occs.len() && occs[j + 1].sym == sym {
                j += 1;
            }
            // markers frame the side, so both neighbours exist
            let mut merged = occs[i - 1].dep.sum(&occs[i].dep)?;
            for occ in &occs[i + 1..=j + 1] {
                merged = merged.sum(&occ.dep)?;
            }
            let mut own = occs[i].dep.clone();
            for occ in &occs[i + 1..=j] {
                own = own.sum(&occ.dep)?;
            }
            for p in merged.positions() {
                if !own.contains(p) {
                    report.push((side, p));
                }
            }
            updates.push((i, j, merged));
            i = j + 1;
        }
        let occs = eq.side_mut(side);
        for (i, j, merged) in updates {
            for occ in &mut occs[i..=j] {
                occ.dep = merged.clone();
            }
        }
    }
    Ok(report)
}

/// Compresses every maximal block `a^l` (`a` in `gamma`, `l >= 2`) on both
/// sides into one fresh letter, extending depfactors first. Equal blocks
/// compressed in the same phase share their fresh letter.
pub fn block_compress_equation(
    eq: &mut Equation,
    gamma: &BTreeSet<SymbolId>,
    phase: u32,
    table: &mut SymbolTable,
    log: &mut DerivationLog,
) -> Result<ExtensionReport> {
    let report = extend_for_block(eq, gamma, table)?;
    for side in [Side::Lhs, Side::Rhs] {
        let old = std::mem::take(eq.side_mut(side));
        let mut new: Vec<Occurrence> = Vec::with_capacity(old.len());
        let mut i = 0;
        while i < old.len() {
            let sym = old[i].sym;
            if !(table.is_letter(sym) && gamma.contains(&sym)) {
                new.push(old[i].clone());
                i += 1;
                continue;
            }
            let mut j = i;
            while j + 1 < old.len() && old[j + 1].sym == sym {
                j += 1;
            }
            let len = (j - i + 1) as u64;
            if len >= 2 {
                let (fresh, is_new) = table.fresh_block(phase, sym, len);
                if is_new {
                    log.push(Record::BlockRule {
                        fresh,
                        letter: sym,
                        exp: len,
                        phase,
                    });
                }
                debug_assert!(old[i..=j].iter().all(|o| o.dep == old[i].dep));
                new.push(Occurrence {
                    sym: fresh,
                    dep: old[i].dep.clone(),
                });
            } else {
                new.push(old[i].clone());
            }
            i = j + 1;
        }
        *eq.side_mut(side) = new;
    }
    Ok(report)
}

/// One pair-popping round: prepend the guessed first letter when it lies in
/// the right class, append the guessed last letter when it lies in the left
/// class, removing variables whose image becomes empty.
pub fn pop_letters(
    eq: &mut Equation,
    partition: &Partition,
    guesses: &BTreeMap<SymbolId, PairPopGuess>,
    phase: u32,
    table: &SymbolTable,
    log: &mut DerivationLog,
) -> Result<()> {
    for (&var, g) in guesses {
        if let Some(b) = g.left {
            if !partition.right.contains(&b) {
                return Err(SolverError::IllegalPop(format!(
                    "left pop {} is not in the right class",
                    table.display(b)
                )));
            }
        }
        if let Some(a) = g.right {
            if !partition.left.contains(&a) {
                return Err(SolverError::IllegalPop(format!(
                    "right pop {} is not in the left class",
                    table.display(a)
                )));
            }
        }
        if g.becomes_empty && g.left.is_none() && g.right.is_none() {
            return Err(SolverError::InconsistentGuess(
                "image cannot become empty without popping".into(),
            ));
        }
        if eq.occurrence_count(var) == 0 {
            return Err(SolverError::InconsistentGuess(format!(
                "{} does not occur",
                table.display(var)
            )));
        }
    }

    for side in [Side::Lhs, Side::Rhs] {
        let old = std::mem::take(eq.side_mut(side));
        let mut new = Vec::with_capacity(old.len());
        for occ in old {
            let Some(g) = guesses.get(&occ.sym) else {
                new.push(occ);
                continue;
            };
            debug_assert!(occ.dep.is_basic());
            if let Some(b) = g.left {
                new.push(Occurrence {
                    sym: b,
                    dep: occ.dep.clone(),
                });
            }
            if !g.becomes_empty {
                new.push(occ.clone());
            }
            if let Some(a) = g.right {
                new.push(Occurrence {
                    sym: a,
                    dep: occ.dep.clone(),
                });
            }
        }
        *eq.side_mut(side) = new;
    }

    for (&var, g) in guesses {
        if let Some(b) = g.left {
            log.push(Record::Pop {
                var,
                side: PopSide::Left,
                letters: vec![b],
                phase,
            });
        }
        if let Some(a) = g.right {
            log.push(Record::Pop {
                var,
                side: PopSide::Right,
                letters: vec![a],
                phase,
            });
        }
        if g.becomes_empty {
            eq.set_occurrence_count(var, 0);
            log.push(Record::Removed { var, phase });
        }
    }
    Ok(())
}

/// Which letter class runs its extension pass first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionOrder {
    LeftClassFirst,
    RightClassFirst,
}

/// Depfactor extension before pair compression: left-class letters absorb
/// the depfactor of the symbol to their right, then right-class letters
/// absorb the one to their left (or in the opposite pass order). Reads
/// within one pass are snapshotted.
pub fn extend_for_pair(
    eq: &mut Equation,
    partition: &Partition,
    order: ExtensionOrder,
    table: &SymbolTable,
) -> Result<ExtensionReport> {
    let mut report = Vec::new();
    let passes: [(bool, &BTreeSet<SymbolId>); 2] = match order {
        ExtensionOrder::LeftClassFirst => [(true, &partition.left), (false, &partition.right)],
        ExtensionOrder::RightClassFirst => [(false, &partition.right), (true, &partition.left)],
    };
    for (absorb_right, class) in passes {
        for side in [Side::Lhs, Side::Rhs] {
            let occs = eq.side(side);
            let mut updates: Vec<(usize, Depfactor)> = Vec::new();
            for i in 1..occs.len() - 1 {
                let sym = occs[i].sym;
                if !(table.is_letter(sym) && class.contains(&sym)) {
                    continue;
                }
                let neighbour = if absorb_right { i + 1 } else { i - 1 };
                let merged = occs[i].dep.sum(&occs[neighbour].dep)?;
                for p in merged.positions() {
                    if !occs[i].dep.contains(p) {
                        report.push((side, p));
                    }
                }
                updates.push((i, merged));
            }
            let occs = eq.side_mut(side);
            for (i, merged) in updates {
                occs[i].dep = merged;
            }
        }
    }
    Ok(report)
}

/// Compresses every explicit pair `ab` with `a` in the left class and `b`
/// in the right class into one fresh letter, extending depfactors first and
/// marking all ordered pairs of the partition as covered.
pub fn pair_compress_equation(
    eq: &mut Equation,
    partition: &Partition,
    phase: u32,
    step: u32,
    table: &mut SymbolTable,
    log: &mut DerivationLog,
    coverage: &mut CoverageState,
) -> Result<ExtensionReport> {
    // validated on construction, but partitions can be built by hand
    if !partition.left.is_disjoint(&partition.right) {
        return Err(SolverError::PartitionNotDisjoint);
    }
    let report = extend_for_pair(eq, partition, ExtensionOrder::LeftClassFirst, table)?;
    for side in [Side::Lhs, Side::Rhs] {
        let old = std::mem::take(eq.side_mut(side));
        let mut new: Vec<Occurrence> = Vec::with_capacity(old.len());
        let mut i = 0;
        while i < old.len() {
            if i + 1 < old.len()
                && partition.left.contains(&old[i].sym)
                && partition.right.contains(&old[i + 1].sym)
            {
                let (fresh, is_new) = table.fresh_pair(phase, step, old[i].sym, old[i + 1].sym);
                if is_new {
                    log.push(Record::PairRule {
                        fresh,
                        left: old[i].sym,
                        right: old[i + 1].sym,
                        phase,
                    });
                }
                debug_assert_eq!(old[i].dep, old[i + 1].dep);
                let dep = old[i].dep.sum(&old[i + 1].dep)?;
                new.push(Occurrence { sym: fresh, dep });
                i += 2;
            } else {
                new.push(old[i].clone());
                i += 1;
            }
        }
        *eq.side_mut(side) = new;
    }
    coverage.cover(partition);
    Ok(report)
}

/// Block compression of a plain letter string; shares the fresh-letter
/// tables with equation compression in the same phase.
pub fn block_compress_str(
    w: &[SymbolId],
    gamma: &BTreeSet<SymbolId>,
    phase: u32,
    table: &mut SymbolTable,
    log: &mut DerivationLog,
) -> Vec<SymbolId> {
    let mut out = Vec::with_capacity(w.len());
    let mut i = 0;
    while i < w.len() {
        let sym = w[i];
        let mut j = i;
        while j + 1 < w.len() && w[j + 1] == sym {
            j += 1;
        }
        let len = (j - i + 1) as u64;
        if len >= 2 && gamma.contains(&sym) {
            let (fresh, is_new) = table.fresh_block(phase, sym, len);
            if is_new {
                log.push(Record::BlockRule {
                    fresh,
                    letter: sym,
                    exp: len,
                    phase,
                });
            }
            out.push(fresh);
        } else {
            out.extend_from_slice(&w[i..=j]);
        }
        i = j + 1;
    }
    out
}

/// Pair compression of a plain letter string under a partition.
pub fn pair_compress_str(
    w: &[SymbolId],
    partition: &Partition,
    phase: u32,
    step: u32,
    table: &mut SymbolTable,
    log: &mut DerivationLog,
) -> Result<Vec<SymbolId>> {
    if !partition.left.is_disjoint(&partition.right) {
        return Err(SolverError::PartitionNotDisjoint);
    }
    let mut out = Vec::with_capacity(w.len());
    let mut i = 0;
    while i < w.len() {
        if i + 1 < w.len()
            && partition.left.contains(&w[i])
            && partition.right.contains(&w[i + 1])
        {
            let (fresh, is_new) = table.fresh_pair(phase, step, w[i], w[i + 1]);
            if is_new {
                log.push(Record::PairRule {
                    fresh,
                    left: w[i],
                    right: w[i + 1],
                    phase,
                });
            }
            out.push(fresh);
            i += 2;
        } else {
            out.push(w[i]);
            i += 1;
        }
    }
    Ok(out)
}

/// Partition schedule that covers every ordered pair of distinct letters:
/// split by each bit of the letter index, then the complements.
pub fn canonical_schedule(gamma_sorted: &[SymbolId]) -> Vec<Partition> {
    let m = gamma_sorted.len();
    if m < 2 {
        return Vec::new();
    }
    let bits = usize::BITS - (m - 1).leading_zeros();
    let mut schedule = Vec::with_capacity(2 * bits as usize);
    for complement in [false, true] {
        for bit in 0..bits {
            let mut left = BTreeSet::new();
            let mut right = BTreeSet::new();
            for (idx, &sym) in gamma_sorted.iter().enumerate() {
                let is_right = (idx >> bit) & 1 == 1;
                if is_right != complement {
                    right.insert(sym);
                } else {
                    left.insert(sym);
                }
            }
            schedule.push(Partition { left, right });
        }
    }
    schedule
}

/// One full phase on a ground letter string: block compression, then the
/// canonical partition schedule. Returns the compressed string.
pub fn compress_phase_string(
    w: &[SymbolId],
    phase: u32,
    table: &mut SymbolTable,
    log: &mut DerivationLog,
) -> Result<Vec<SymbolId>> {
    let gamma: BTreeSet<SymbolId> = w.iter().copied().collect();
    let gamma_sorted: Vec<SymbolId> = gamma.iter().copied().collect();
    let mut cur = block_compress_str(w, &gamma, phase, table, log);
    let mut coverage = CoverageState::new(&gamma);
    for (step, partition) in canonical_schedule(&gamma_sorted).iter().enumerate() {
        cur = pair_compress_str(&cur, partition, phase, step as u32, table, log)?;
        coverage.cover(partition);
    }
    debug_assert!(coverage.is_complete());
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::parse_equation;

    fn syms(table: &mut SymbolTable, text: &str) -> Vec<SymbolId> {
        text.chars().map(|c| table.intern_char(c).unwrap()).collect()
    }

    fn gamma_of(w: &[SymbolId]) -> BTreeSet<SymbolId> {
        w.iter().copied().collect()
    }

    #[test]
    fn block_compression_of_strings() {
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let w = syms(&mut table, "aaabbc");
        let gamma = gamma_of(&w);
        let out = block_compress_str(&w, &gamma, 1, &mut table, &mut log);
        assert_eq!(out.len(), 3);
        assert_eq!(table.expand(out[0]).unwrap().to_vec(), syms(&mut table, "aaa"));
        assert_eq!(table.expand(out[1]).unwrap().to_vec(), syms(&mut table, "bb"));
        assert_eq!(out[2], table.intern_char('c').unwrap());
    }

    #[test]
    fn block_compression_leaves_short_runs() {
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let w = syms(&mut table, "abc");
        let out = block_compress_str(&w, &gamma_of(&w), 1, &mut table, &mut log);
        assert_eq!(out, w);
    }

    #[test]
    fn equal_blocks_share_one_fresh_letter() {
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let w = syms(&mut table, "aabaa");
        let out = block_compress_str(&w, &gamma_of(&w), 1, &mut table, &mut log);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0], out[2]);
        assert_ne!(out[0], out[1]);
    }

    #[test]
    fn pair_compression_of_strings() {
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let a = table.intern_char('a').unwrap();
        let b = table.intern_char('b').unwrap();
        let p = Partition::new([a].into(), [b].into()).unwrap();

        let w = syms(&mut table, "abab");
        let out = pair_compress_str(&w, &p, 1, 0, &mut table, &mut log).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0], out[1]);

        let w = syms(&mut table, "aab");
        let out = pair_compress_str(&w, &p, 1, 1, &mut table, &mut log).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0], a);

        let w = syms(&mut table, "ba");
        let out = pair_compress_str(&w, &p, 1, 2, &mut table, &mut log).unwrap();
        assert_eq!(out, w);
    }

    #[test]
    fn overlapping_partition_is_rejected() {
        let mut table = SymbolTable::new();
        let a = table.intern_char('a').unwrap();
        assert!(Partition::new([a].into(), [a].into()).is_err());
    }

    #[test]
    fn pop_blocks_makes_crossing_blocks_explicit() {
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let mut eq = parse_equation("XX=aabaab", &mut table).unwrap();
        let a = table.intern_char('a').unwrap();
        let b = table.intern_char('b').unwrap();
        let x = table.intern_char('X').unwrap();
        let mut guesses = BTreeMap::new();
        guesses.insert(
            x,
            BlockPopGuess {
                first: a,
                prefix_len: 2,
                suffix: Some((b, 1)),
                becomes_empty: true,
            },
        );
        pop_blocks(&mut eq, &guesses, 1, &table, &mut log).unwrap();
        assert!(eq.sides_equal());
        assert_eq!(eq.side_len(Side::Lhs), 6);
        assert_eq!(eq.occurrence_count(x), 0);
        assert!(eq.counts_consistent(&table));
    }

    #[test]
    fn pop_blocks_partial_pop_keeps_variable() {
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let mut eq = parse_equation("aX=Xa", &mut table).unwrap();
        let a = table.intern_char('a').unwrap();
        let x = table.intern_char('X').unwrap();
        let mut guesses = BTreeMap::new();
        guesses.insert(
            x,
            BlockPopGuess {
                first: a,
                prefix_len: 1,
                suffix: None,
                becomes_empty: false,
            },
        );
        pop_blocks(&mut eq, &guesses, 1, &table, &mut log).unwrap();
        let lhs: Vec<_> = eq.lhs[1..eq.lhs.len() - 1].iter().map(|o| o.sym).collect();
        let rhs: Vec<_> = eq.rhs[1..eq.rhs.len() - 1].iter().map(|o| o.sym).collect();
        assert_eq!(lhs, vec![a, a, x]);
        assert_eq!(rhs, vec![a, x, a]);
        assert_eq!(eq.occurrence_count(x), 2);
    }

    #[test]
    fn zero_length_prefix_is_inconsistent() {
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let mut eq = parse_equation("aX=Xa", &mut table).unwrap();
        let a = table.intern_char('a').unwrap();
        let x = table.intern_char('X').unwrap();
        let mut guesses = BTreeMap::new();
        guesses.insert(
            x,
            BlockPopGuess {
                first: a,
                prefix_len: 0,
                suffix: None,
                becomes_empty: true,
            },
        );
        assert!(matches!(
            pop_blocks(&mut eq, &guesses, 1, &table, &mut log),
            Err(SolverError::InconsistentGuess(_))
        ));
    }

    #[test]
    fn block_compress_equation_example() {
        // continuation of pop_blocks_makes_crossing_blocks_explicit
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let mut eq = parse_equation("aabaab=aabaab", &mut table).unwrap();
        let gamma = eq.alphabet(&table);
        block_compress_equation(&mut eq, &gamma, 1, &mut table, &mut log).unwrap();
        assert!(eq.sides_equal());
        assert_eq!(eq.side_len(Side::Lhs), 4); // a2 b a2 b
        let lhs: Vec<_> = eq.lhs[1..5].iter().map(|o| o.sym).collect();
        assert_eq!(lhs[0], lhs[2]);
        assert_eq!(lhs[1], lhs[3]);
    }

    #[test]
    fn variables_separate_blocks() {
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let mut eq = parse_equation("aXa=aaa", &mut table).unwrap();
        let gamma = eq.alphabet(&table);
        block_compress_equation(&mut eq, &gamma, 1, &mut table, &mut log).unwrap();
        assert_eq!(eq.side_len(Side::Lhs), 3); // a X a untouched
        assert_eq!(eq.side_len(Side::Rhs), 1); // aaa collapsed
    }

    #[test]
    fn pop_letters_respects_partition_guards() {
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let mut eq = parse_equation("aXb=bXa", &mut table).unwrap();
        let a = table.intern_char('a').unwrap();
        let b = table.intern_char('b').unwrap();
        let x = table.intern_char('X').unwrap();
        let p = Partition::new([a].into(), [b].into()).unwrap();

        let mut guesses = BTreeMap::new();
        guesses.insert(
            x,
            PairPopGuess {
                left: Some(a), // a is in the left class: illegal left pop
                right: None,
                becomes_empty: false,
            },
        );
        assert!(matches!(
            pop_letters(&mut eq, &p, &guesses, 1, &table, &mut log),
            Err(SolverError::IllegalPop(_))
        ));

        let mut guesses = BTreeMap::new();
        guesses.insert(
            x,
            PairPopGuess {
                left: Some(b),
                right: Some(a),
                becomes_empty: false,
            },
        );
        pop_letters(&mut eq, &p, &guesses, 1, &table, &mut log).unwrap();
        let lhs: Vec<_> = eq.lhs[1..eq.lhs.len() - 1].iter().map(|o| o.sym).collect();
        assert_eq!(lhs, vec![a, b, x, a, b]);
    }

    #[test]
    fn pair_compress_equation_minimal_case() {
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let mut eq = parse_equation("ab=ab", &mut table).unwrap();
        let a = table.intern_char('a').unwrap();
        let b = table.intern_char('b').unwrap();
        let gamma = eq.alphabet(&table);
        let mut coverage = CoverageState::new(&gamma);
        let p = Partition::new([a].into(), [b].into()).unwrap();
        pair_compress_equation(&mut eq, &p, 1, 0, &mut table, &mut log, &mut coverage).unwrap();
        assert_eq!(eq.side_len(Side::Lhs), 1);
        assert!(eq.sides_equal());
        assert_eq!(coverage.remaining(), 1); // (b, a) still uncovered
    }

    #[test]
    fn coverage_updates_even_without_compressions() {
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let mut eq = parse_equation("ba=ba", &mut table).unwrap();
        let a = table.intern_char('a').unwrap();
        let b = table.intern_char('b').unwrap();
        let gamma = eq.alphabet(&table);
        let mut coverage = CoverageState::new(&gamma);
        let p = Partition::new([a].into(), [b].into()).unwrap();
        let before = eq.clone();
        pair_compress_equation(&mut eq, &p, 1, 0, &mut table, &mut log, &mut coverage).unwrap();
        assert_eq!(eq.side(Side::Lhs).len(), before.side(Side::Lhs).len());
        assert_eq!(coverage.remaining(), 1);
    }

    #[test]
    fn canonical_schedule_covers_all_pairs() {
        for m in 1..=9usize {
            let mut table = SymbolTable::new();
            let letters: Vec<SymbolId> = (0..m)
                .map(|i| table.intern_char((b'a' + i as u8) as char).unwrap())
                .collect();
            let gamma: BTreeSet<SymbolId> = letters.iter().copied().collect();
            let mut coverage = CoverageState::new(&gamma);
            let schedule = canonical_schedule(&letters);
            if m >= 2 {
                let bits = (usize::BITS - (m - 1).leading_zeros()) as usize;
                assert_eq!(schedule.len(), 2 * bits);
            }
            for p in &schedule {
                assert!(p.left.is_disjoint(&p.right));
                coverage.cover(p);
            }
            assert!(coverage.is_complete(), "m={m} left {}", coverage.remaining());
        }
    }

    #[test]
    fn ground_phase_compresses_alternating_string() {
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let w = syms(&mut table, "ababab");
        let out = compress_phase_string(&w, 1, &mut table, &mut log).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|&s| s == out[0]));
        assert!(3 * 3 <= 2 * 6 + 1);
    }

    #[test]
    fn ground_phase_on_uniform_and_single_letter() {
        let mut table = SymbolTable::new();
        let mut log = DerivationLog::new();
        let w = syms(&mut table, "aaaa");
        let out = compress_phase_string(&w, 1, &mut table, &mut log).unwrap();
        assert_eq!(out.len(), 1);

        let w = syms(&mut table, "a");
        let out = compress_phase_string(&w, 2, &mut table, &mut log).unwrap();
        assert_eq!(out, w);
    }

    #[test]
    fn extension_merges_neighbour_depfactors() {
        let mut table = SymbolTable::new();
        let mut eq = parse_equation("ab=ab", &mut table).unwrap();
        let a = table.intern_char('a').unwrap();
        let b = table.intern_char('b').unwrap();
        let p = Partition::new([a].into(), [b].into()).unwrap();
        let report = extend_for_pair(&mut eq, &p, ExtensionOrder::LeftClassFirst, &table).unwrap();
        // lhs positions: @=0 a=1 b=2 @=3; a absorbs b's, b absorbs a's new dep
        assert_eq!(eq.lhs[1].dep, eq.lhs[2].dep);
        assert!(eq.lhs[1].dep.contains(1) && eq.lhs[1].dep.contains(2));
        // a entered sup(2), b entered sup(1); same on the rhs
        assert_eq!(report.len(), 4);
    }

    #[test]
    fn extension_order_does_not_matter() {
        let mut table = SymbolTable::new();
        let eq0 = parse_equation("abab=abab", &mut table).unwrap();
        let a = table.intern_char('a').unwrap();
        let b = table.intern_char('b').unwrap();
        let p = Partition::new([a].into(), [b].into()).unwrap();
        let mut eq1 = eq0.clone();
        let mut eq2 = eq0;
        extend_for_pair(&mut eq1, &p, ExtensionOrder::LeftClassFirst, &table).unwrap();
        extend_for_pair(&mut eq2, &p, ExtensionOrder::RightClassFirst, &table).unwrap();
        assert_eq!(eq1, eq2);
    }

    #[test]
    fn block_extension_covers_whole_runs_and_neighbours() {
        let mut table = SymbolTable::new();
        let mut eq = parse_equation("aaX=aaX", &mut table).unwrap();
        let gamma = eq.alphabet(&table);
        extend_for_block(&mut eq, &gamma, &table).unwrap();
        // both a's share @ + a + a + X positions
        assert_eq!(eq.lhs[1].dep, eq.lhs[2].dep);
        for pos in 0..=3 {
            assert!(eq.lhs[1].dep.contains(pos));
        }
        // marker and variable depfactors stay basic
        assert!(eq.lhs[0].dep.is_basic());
        assert!(eq.lhs[3].dep.is_basic());
    }
}
