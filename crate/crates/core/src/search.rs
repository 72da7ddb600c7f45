//! Blind backtracking search over the nondeterministic choices.
//!
//! Depth-first over phases: per phase, which variables have the empty
//! image, which letters pop at the block stage (exponents capped by the
//! configuration) and at each round of the fixed partition schedule. A
//! branch dies as soon as the ground prefixes or suffixes of the two sides
//! disagree, the side lengths become infeasible, or a cap is hit; it
//! succeeds when both sides are literally equal or one side is a lone
//! variable absent from the other. SAT verdicts always come with a witness
//! that is verified against the input equation before being returned.
//!
//! Exhausted subtrees are memoized under a renaming-canonical form of the
//! state (letters and variables numbered by first occurrence). The
//! partition schedule is built over the first-occurrence order of the
//! phase alphabet, so isomorphic states explore isomorphic subtrees and a
//! memo hit is exact, not heuristic. The memo may be shared across
//! equations: entries are facts about canonical states under fixed caps.

use std::collections::{BTreeMap, HashMap};

use crate::config::SolverConfig;
use crate::depfactor::Side;
use crate::derivation::{reconstruct_witness, DerivationLog};
use crate::equation::{check_solution, Equation, Substitution};
use crate::error::{Result, SolverError};
use crate::recompress::{
    block_compress_equation, canonical_schedule, pair_compress_equation, pop_blocks, pop_letters,
    remove_variable, BlockPopGuess, CoverageState, PairPopGuess, Partition,
};
use crate::symbol::{SymbolId, SymbolTable};

#[derive(Debug, Clone)]
pub enum Verdict {
    Sat(Substitution),
    UnsatWithinBounds {
        max_phases: u32,
        max_block_exponent: u64,
    },
    Unknown {
        nodes: u64,
    },
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub deepest_phase: u32,
    pub memo_hits: u64,
    pub memo_entries: u64,
}

#[derive(Debug)]
pub struct BlindOutcome {
    pub verdict: Verdict,
    pub stats: SearchStats,
}

/// Exhausted-state memo, reusable across equations solved under the same
/// caps. Values are the largest phase budget proven to admit no solution
/// from the keyed state.
#[derive(Debug, Default)]
pub struct SearchCache {
    map: HashMap<Vec<u32>, u32>,
    caps: Option<(u32, u64, u64)>,
}

const CACHE_MAX_ENTRIES: usize = 16_000_000;

impl SearchCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn bind(&mut self, cfg: &SolverConfig) -> Result<()> {
        let caps = (cfg.max_phases, cfg.max_block_exponent, cfg.space_cap_bits);
        match self.caps {
            None => {
                self.caps = Some(caps);
                Ok(())
            }
            Some(c) if c == caps => Ok(()),
            Some(_) => Err(SolverError::Invariant(
                "search cache reused under different caps".into(),
            )),
        }
    }
}

/// Searches for a solution within the configured caps.
pub fn solve_blind(
    eq: &Equation,
    cfg: &SolverConfig,
    table: &mut SymbolTable,
) -> Result<BlindOutcome> {
    let mut cache = SearchCache::new();
    solve_blind_with_cache(eq, cfg, table, &mut cache)
}

/// Same as [`solve_blind`] with a caller-owned memo; verdicts do not depend
/// on the cache contents, only the amount of re-exploration does.
///
/// The phase budget is explored iteratively (1, 2, ..., max_phases) so that
/// solutions reachable in few phases are found before deep speculative
/// subtrees are entered; the memo makes the repeated shallow passes cheap.
pub fn solve_blind_with_cache(
    eq: &Equation,
    cfg: &SolverConfig,
    table: &mut SymbolTable,
    cache: &mut SearchCache,
) -> Result<BlindOutcome> {
    cfg.validate()?;
    cache.bind(cfg)?;
    let mut stats = SearchStats::default();
    let mut budget_hit = false;
    let mut found = None;
    for depth in 1..=cfg.max_phases {
        let mut dfs = Dfs {
            table,
            cfg: cfg.clone(),
            depth,
            limit_hit: false,
            log: DerivationLog::new(),
            stats,
            budget_hit,
            cache,
        };
        found = dfs.visit(eq, 1)?;
        stats = dfs.stats;
        budget_hit = dfs.budget_hit;
        if found.is_some() || budget_hit || !dfs.limit_hit {
            break;
        }
    }
    stats.memo_entries = cache.len() as u64;
    let verdict = match found {
        Some(witness) => {
            if !check_solution(eq, &witness, table)? {
                return Err(SolverError::Invariant(
                    "search produced a witness that does not verify".into(),
                ));
            }
            Verdict::Sat(witness)
        }
        None if budget_hit => Verdict::Unknown { nodes: stats.nodes },
        None => Verdict::UnsatWithinBounds {
            max_phases: cfg.max_phases,
            max_block_exponent: cfg.max_block_exponent,
        },
    };
    Ok(BlindOutcome { verdict, stats })
}

enum Tri {
    Sat(BTreeMap<SymbolId, Vec<SymbolId>>),
    Dead,
    Continue,
}

const KEY_SEP: u32 = u32::MAX;
const STAGE_BOUNDARY: u32 = u32::MAX - 1;
const STAGE_BLOCK: u32 = u32::MAX - 2;
const STAGE_PAIR_BASE: u32 = 1 << 24;

struct Dfs<'t, 'c> {
    table: &'t mut SymbolTable,
    cfg: SolverConfig,
    /// Phase limit of the current deepening pass.
    depth: u32,
    /// Whether this pass was cut anywhere by the depth limit or a memo
    /// entry that a deeper pass could get past.
    limit_hit: bool,
    log: DerivationLog,
    stats: SearchStats,
    budget_hit: bool,
    cache: &'c mut SearchCache,
}

impl<'t, 'c> Dfs<'t, 'c> {
    /// Letters in first-occurrence order; the canonical schedule is built
    /// over this order so that renaming-isomorphic states get isomorphic
    /// schedules.
    fn gamma_in_order(&self, eq: &Equation) -> Vec<SymbolId> {
        let mut out = Vec::new();
        for occ in eq.lhs.iter().chain(eq.rhs.iter()) {
            if self.table.is_letter(occ.sym) && !out.contains(&occ.sym) {
                out.push(occ.sym);
            }
        }
        out
    }

    fn vars_in_order(&self, eq: &Equation) -> Vec<SymbolId> {
        let mut out = Vec::new();
        for occ in eq.lhs.iter().chain(eq.rhs.iter()) {
            if self.table.is_variable(occ.sym) && !out.contains(&occ.sym) {
                out.push(occ.sym);
            }
        }
        out
    }

    /// Renaming-canonical key of (equation, stage, pending work). Symbols
    /// are numbered by first encounter along lhs, rhs, the phase alphabet
    /// and the pending-variable list, with a class bit separating letters
    /// from variables.
    fn canon_key(
        &self,
        eq: &Equation,
        stage: u32,
        gamma_tail: &[SymbolId],
        pending: &[SymbolId],
    ) -> Vec<u32> {
        let mut ids: HashMap<SymbolId, u32> = HashMap::new();
        let mut next = 0u32;
        let mut key =
            Vec::with_capacity(eq.lhs.len() + eq.rhs.len() + gamma_tail.len() + pending.len() + 6);
        key.push(stage);
        {
            let mut encode = |sym: SymbolId, is_var: bool, key: &mut Vec<u32>| {
                let id = *ids.entry(sym).or_insert_with(|| {
                    let id = next;
                    next += 1;
                    id
                });
                key.push(id << 1 | is_var as u32);
            };
            for side in [&eq.lhs, &eq.rhs] {
                for occ in &side[1..side.len() - 1] {
                    encode(occ.sym, self.table.is_variable(occ.sym), &mut key);
                }
                key.push(KEY_SEP);
            }
            for &sym in gamma_tail {
                encode(sym, false, &mut key);
            }
            key.push(KEY_SEP);
            for &sym in pending {
                encode(sym, true, &mut key);
            }
        }
        key
    }

    /// Phase budget still available at `phase` (including it); exhaustion
    /// proofs transfer to any state with a smaller or equal budget.
    fn budget_at(&self, phase: u32) -> u32 {
        self.depth.saturating_sub(phase) + 1
    }

    fn memo_hit(&mut self, key: &[u32], budget: u32) -> bool {
        if let Some(&proved) = self.cache.map.get(key) {
            if proved >= budget {
                self.stats.memo_hits += 1;
                if self.depth < self.cfg.max_phases {
                    // a deeper pass would carry a larger budget here
                    self.limit_hit = true;
                }
                return true;
            }
        }
        false
    }

    fn memo_store(&mut self, key: Vec<u32>, budget: u32) {
        if self.budget_hit || self.cache.map.len() >= CACHE_MAX_ENTRIES {
            return;
        }
        let slot = self.cache.map.entry(key).or_insert(0);
        *slot = (*slot).max(budget);
    }

    fn visit(&mut self, eq: &Equation, phase: u32) -> Result<Option<Substitution>> {
        match self.check(eq, 0)? {
            Tri::Sat(terminal) => return self.finish(&terminal),
            Tri::Dead => return Ok(None),
            Tri::Continue => {}
        }
        if phase > self.depth {
            self.limit_hit = true;
            return Ok(None);
        }
        self.stats.deepest_phase = self.stats.deepest_phase.max(phase);
        let budget = self.budget_at(phase);
        let key = self.canon_key(eq, STAGE_BOUNDARY, &[], &[]);
        if self.memo_hit(&key, budget) {
            return Ok(None);
        }

        // the per-phase guesses of which variables already have the empty
        // image, most removals first so all-empty witnesses surface early
        let vars = self.vars_in_order(eq);
        let mut masks: Vec<u32> = (0..(1u32 << vars.len())).collect();
        masks.sort_by_key(|m| (vars.len() as u32 - m.count_ones(), *m));
        for mask in masks {
            if self.budget_hit {
                return Ok(None);
            }
            let mark = self.log.len();
            let mut next = eq.clone();
            for (i, &var) in vars.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    remove_variable(&mut next, var, phase, &mut self.log);
                }
            }
            let result = if mask == 0 {
                self.block_stage(eq, phase, &vars, 0)?
            } else {
                match self.check(&next, 0)? {
                    Tri::Sat(terminal) => self.finish(&terminal)?,
                    Tri::Dead => None,
                    Tri::Continue => {
                        let pending = self.vars_in_order(&next);
                        self.block_stage(&next, phase, &pending, 0)?
                    }
                }
            };
            if let Some(w) = result {
                return Ok(Some(w));
            }
            self.log.truncate(mark);
        }
        self.memo_store(key, budget);
        Ok(None)
    }

    fn block_stage(
        &mut self,
        eq: &Equation,
        phase: u32,
        vars: &[SymbolId],
        i: usize,
    ) -> Result<Option<Substitution>> {
        if self.budget_hit {
            return Ok(None);
        }
        let budget = self.budget_at(phase);
        let gamma = self.gamma_in_order(eq);
        if i == vars.len() {
            // all pops placed: compress the explicit blocks
            let mark = self.log.len();
            let mut next = eq.clone();
            let gamma_set = gamma.iter().copied().collect();
            block_compress_equation(&mut next, &gamma_set, phase, self.table, &mut self.log)?;
            let result = match self.check(&next, 1)? {
                Tri::Sat(terminal) => self.finish(&terminal)?,
                Tri::Dead => None,
                Tri::Continue => {
                    let schedule = canonical_schedule(&gamma);
                    let pending = self.vars_in_order(&next);
                    self.pair_round(&next, phase, &gamma, &schedule, 0, &pending, 0)?
                }
            };
            if result.is_none() {
                self.log.truncate(mark);
            }
            return Ok(result);
        }

        let key = self.canon_key(eq, STAGE_BLOCK, &[], &vars[i..]);
        if self.memo_hit(&key, budget) {
            return Ok(None);
        }
        let var = vars[i];
        let firsts: Vec<SymbolId> = match forced_first(eq, var, self.table) {
            Some(f) => vec![f],
            None => gamma.clone(),
        };
        let forced_b = forced_last(eq, var, self.table);
        let lasts: Vec<SymbolId> = match forced_b {
            Some(f) => vec![f],
            None => gamma.clone(),
        };
        // guesses ordered by the length their claim forces on the image,
        // so short witnesses surface before deep speculative branches
        let cap = self.cfg.max_block_exponent;
        for &a in &firsts {
            for prefix_len in 1..=cap {
                // image = a^l exactly: its last letter is a
                if forced_b.map(|f| f == a).unwrap_or(true) {
                    let g = BlockPopGuess {
                        first: a,
                        prefix_len,
                        suffix: None,
                        becomes_empty: true,
                    };
                    if let Some(w) = self.apply_block_guess(eq, phase, vars, i, var, g)? {
                        return Ok(Some(w));
                    }
                }
                // image = a^l b^r with b distinct from a
                for &b in &lasts {
                    if b == a {
                        continue;
                    }
                    for r in 1..=cap {
                        let g = BlockPopGuess {
                            first: a,
                            prefix_len,
                            suffix: Some((b, r)),
                            becomes_empty: true,
                        };
                        if let Some(w) = self.apply_block_guess(eq, phase, vars, i, var, g)? {
                            return Ok(Some(w));
                        }
                    }
                }
                // image = a^l w b^r with a non-empty remainder
                for &b in &lasts {
                    for r in 1..=cap {
                        let g = BlockPopGuess {
                            first: a,
                            prefix_len,
                            suffix: Some((b, r)),
                            becomes_empty: false,
                        };
                        if let Some(w) = self.apply_block_guess(eq, phase, vars, i, var, g)? {
                            return Ok(Some(w));
                        }
                    }
                }
            }
        }
        self.memo_store(key, budget);
        Ok(None)
    }

    fn apply_block_guess(
        &mut self,
        eq: &Equation,
        phase: u32,
        vars: &[SymbolId],
        i: usize,
        var: SymbolId,
        guess: BlockPopGuess,
    ) -> Result<Option<Substitution>> {
        if self.budget_hit {
            return Ok(None);
        }
        let mark = self.log.len();
        let mut next = eq.clone();
        let mut guesses = BTreeMap::new();
        guesses.insert(var, guess);
        pop_blocks(&mut next, &guesses, phase, self.table, &mut self.log)?;
        let result = match self.check(&next, 1)? {
            Tri::Sat(terminal) => self.finish(&terminal)?,
            Tri::Dead => None,
            Tri::Continue => self.block_stage(&next, phase, vars, i + 1)?,
        };
        if result.is_none() {
            self.log.truncate(mark);
        }
        Ok(result)
    }

    #[allow(clippy::too_many_arguments)]
    fn pair_round(
        &mut self,
        eq: &Equation,
        phase: u32,
        gamma: &[SymbolId],
        schedule: &[Partition],
        round: usize,
        pending: &[SymbolId],
        i: usize,
    ) -> Result<Option<Substitution>> {
        if self.budget_hit {
            return Ok(None);
        }
        let Some(partition) = schedule.get(round) else {
            return self.visit(eq, phase + 1);
        };
        let budget = self.budget_at(phase);
        if i == pending.len() {
            // round's pops placed: compress and move to the next round
            let mark = self.log.len();
            let mut next = eq.clone();
            let mut coverage = CoverageState::new(&Default::default());
            pair_compress_equation(
                &mut next,
                partition,
                phase,
                round as u32,
                self.table,
                &mut self.log,
                &mut coverage,
            )?;
            let result = match self.check(&next, 1)? {
                Tri::Sat(terminal) => self.finish(&terminal)?,
                Tri::Dead => None,
                Tri::Continue => {
                    let pending = self.vars_in_order(&next);
                    self.pair_round(&next, phase, gamma, schedule, round + 1, &pending, 0)?
                }
            };
            if result.is_none() {
                self.log.truncate(mark);
            }
            return Ok(result);
        }

        let stage = STAGE_PAIR_BASE + round as u32;
        let key = self.canon_key(eq, stage, gamma, &pending[i..]);
        if self.memo_hit(&key, budget) {
            return Ok(None);
        }
        let var = pending[i];
        let lefts: Vec<Option<SymbolId>> = match forced_first(eq, var, self.table) {
            Some(f) if partition.right.contains(&f) => vec![Some(f)],
            Some(_) => vec![None],
            None => std::iter::once(None)
                .chain(partition.right.iter().copied().map(Some))
                .collect(),
        };
        let rights: Vec<Option<SymbolId>> = match forced_last(eq, var, self.table) {
            Some(f) if partition.left.contains(&f) => vec![Some(f)],
            Some(_) => vec![None],
            None => std::iter::once(None)
                .chain(partition.left.iter().copied().map(Some))
                .collect(),
        };
        for &left in &lefts {
            for &right in &rights {
                let empties: &[bool] = if left.is_none() && right.is_none() {
                    &[false]
                } else {
                    &[true, false]
                };
                for &becomes_empty in empties {
                    let guess = PairPopGuess {
                        left,
                        right,
                        becomes_empty,
                    };
                    if let Some(w) = self.apply_pair_guess(
                        eq, phase, gamma, schedule, round, pending, i, guess,
                    )? {
                        return Ok(Some(w));
                    }
                }
            }
        }
        self.memo_store(key, budget);
        Ok(None)
    }

    #[allow(clippy::too_many_arguments)]
    fn apply_pair_guess(
        &mut self,
        eq: &Equation,
        phase: u32,
        gamma: &[SymbolId],
        schedule: &[Partition],
        round: usize,
        pending: &[SymbolId],
        i: usize,
        guess: PairPopGuess,
    ) -> Result<Option<Substitution>> {
        if self.budget_hit {
            return Ok(None);
        }
        let no_op = guess.left.is_none() && guess.right.is_none();
        let mark = self.log.len();
        let result = if no_op {
            self.pair_round(eq, phase, gamma, schedule, round, pending, i + 1)?
        } else {
            let mut next = eq.clone();
            let mut guesses = BTreeMap::new();
            guesses.insert(pending[i], guess);
            pop_letters(
                &mut next,
                &schedule[round],
                &guesses,
                phase,
                self.table,
                &mut self.log,
            )?;
            match self.check(&next, 1)? {
                Tri::Sat(terminal) => self.finish(&terminal)?,
                Tri::Dead => None,
                Tri::Continue => {
                    self.pair_round(&next, phase, gamma, schedule, round, pending, i + 1)?
                }
            }
        };
        if result.is_none() {
            self.log.truncate(mark);
        }
        Ok(result)
    }

    fn finish(
        &mut self,
        terminal: &BTreeMap<SymbolId, Vec<SymbolId>>,
    ) -> Result<Option<Substitution>> {
        let witness = reconstruct_witness(&self.log, terminal, self.table)?;
        Ok(Some(witness))
    }

    /// Terminal detection and pruning; `min_len` is the length every
    /// remaining variable image is claimed to have at least (1 inside a
    /// phase, 0 at phase boundaries).
    fn check(&mut self, eq: &Equation, min_len: u64) -> Result<Tri> {
        self.stats.nodes += 1;
        if let Some(budget) = self.cfg.node_budget {
            if self.stats.nodes > budget {
                self.budget_hit = true;
                return Ok(Tri::Dead);
            }
        }

        if eq.sides_equal() {
            let terminal = eq.variables().into_iter().map(|v| (v, Vec::new())).collect();
            return Ok(Tri::Sat(terminal));
        }
        for (this, other) in [(Side::Lhs, Side::Rhs), (Side::Rhs, Side::Lhs)] {
            if eq.side_len(this) == 1 {
                let sym = eq.side(this)[1].sym;
                if self.table.is_variable(sym) && !eq.side(other).iter().any(|o| o.sym == sym) {
                    let mut terminal: BTreeMap<SymbolId, Vec<SymbolId>> =
                        eq.variables().into_iter().map(|v| (v, Vec::new())).collect();
                    let image: Vec<SymbolId> = eq.side(other)[1..eq.side(other).len() - 1]
                        .iter()
                        .filter(|o| self.table.is_letter(o.sym))
                        .map(|o| o.sym)
                        .collect();
                    terminal.insert(sym, image);
                    return Ok(Tri::Sat(terminal));
                }
            }
        }

        if self.dead_by_shape(eq, min_len) {
            return Ok(Tri::Dead);
        }
        if eq.is_trivial() {
            // not equal and no lone variable matched above
            return Ok(Tri::Dead);
        }
        // space cap: every occurrence costs at least one bit, and codes
        // never exceed 64 bits, so small equations cannot breach the cap
        let occ = eq.total_occurrences() as u64;
        if occ > self.cfg.space_cap_bits {
            return Ok(Tri::Dead);
        }
        if occ * 64 > self.cfg.space_cap_bits {
            let codes = crate::encoding::rebuild_after_step(eq, self.table)?;
            if codes.total_bits() > self.cfg.space_cap_bits {
                return Ok(Tri::Dead);
            }
        }
        Ok(Tri::Continue)
    }

    /// Ground prefix/suffix agreement and side-length feasibility.
    fn dead_by_shape(&self, eq: &Equation, min_len: u64) -> bool {
        let lhs = &eq.lhs[1..eq.lhs.len() - 1];
        let rhs = &eq.rhs[1..eq.rhs.len() - 1];
        let is_var = |s: SymbolId| self.table.is_variable(s);

        let mut i = 0;
        while i < lhs.len() && i < rhs.len() {
            let (a, b) = (lhs[i].sym, rhs[i].sym);
            if is_var(a) || is_var(b) {
                break;
            }
            if a != b {
                return true;
            }
            i += 1;
        }
        let mut j = 0;
        while j < lhs.len() && j < rhs.len() {
            let (a, b) = (lhs[lhs.len() - 1 - j].sym, rhs[rhs.len() - 1 - j].sym);
            if is_var(a) || is_var(b) {
                break;
            }
            if a != b {
                return true;
            }
            j += 1;
        }

        // counting feasibility: for the whole length and for every letter
        // separately, letters_u + sum n_u(X) img(X) must be able to meet
        // letters_v + sum n_v(X) img(X); image lengths are at least
        // min_len, per-letter image counts at least zero
        let mut deltas: BTreeMap<SymbolId, i64> = BTreeMap::new();
        let mut letter_c0: BTreeMap<SymbolId, i64> = BTreeMap::new();
        let mut c0: i64 = 0;
        for occ in lhs {
            if is_var(occ.sym) {
                *deltas.entry(occ.sym).or_insert(0) += 1;
            } else {
                c0 += 1;
                *letter_c0.entry(occ.sym).or_insert(0) += 1;
            }
        }
        for occ in rhs {
            if is_var(occ.sym) {
                *deltas.entry(occ.sym).or_insert(0) -= 1;
            } else {
                c0 -= 1;
                *letter_c0.entry(occ.sym).or_insert(0) -= 1;
            }
        }
        let nonzero: Vec<i64> = deltas.values().copied().filter(|&d| d != 0).collect();
        let has_pos = nonzero.iter().any(|&d| d > 0);
        let has_neg = nonzero.iter().any(|&d| d < 0);
        let g = nonzero.iter().fold(0i64, |acc, &d| gcd(acc, d.abs()));
        let infeasible = |target: i64| -> bool {
            if nonzero.is_empty() {
                return target != 0;
            }
            if target % g != 0 {
                return true;
            }
            (!has_pos && target > 0) || (!has_neg && target < 0)
        };
        let length_target =
            -c0 - deltas.values().map(|&d| d * min_len as i64).sum::<i64>();
        if infeasible(length_target) {
            return true;
        }
        for &count in letter_c0.values() {
            if infeasible(-count) {
                return true;
            }
        }
        false
    }
}

/// First letter of the variable's image when the equation forces it: the
/// variable opens one side while the other side opens with a letter.
fn forced_first(eq: &Equation, var: SymbolId, table: &SymbolTable) -> Option<SymbolId> {
    let l = eq.lhs[1].sym;
    let r = eq.rhs[1].sym;
    if l == var && table.is_letter(r) {
        return Some(r);
    }
    if r == var && table.is_letter(l) {
        return Some(l);
    }
    None
}

fn forced_last(eq: &Equation, var: SymbolId, table: &SymbolTable) -> Option<SymbolId> {
    let l = eq.lhs[eq.lhs.len() - 2].sym;
    let r = eq.rhs[eq.rhs.len() - 2].sym;
    if l == var && table.is_letter(r) {
        return Some(r);
    }
    if r == var && table.is_letter(l) {
        return Some(l);
    }
    None
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::parse_equation;

    fn solve(text: &str, cfg: &SolverConfig) -> (Verdict, SymbolTable) {
        let mut table = SymbolTable::new();
        let eq = parse_equation(text, &mut table).unwrap();
        let out = solve_blind(&eq, cfg, &mut table).unwrap();
        (out.verdict, table)
    }

    fn small_caps() -> SolverConfig {
        SolverConfig {
            max_phases: 4,
            max_block_exponent: 4,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn commutation_is_sat() {
        let (verdict, _) = solve("aX=Xa", &small_caps());
        assert!(verdict.is_sat());
    }

    #[test]
    fn shifted_letters_are_unsat() {
        let (verdict, _) = solve("aX=Xb", &small_caps());
        assert!(matches!(verdict, Verdict::UnsatWithinBounds { .. }));
    }

    #[test]
    fn ground_mismatch_dies_immediately() {
        let mut table = SymbolTable::new();
        let eq = parse_equation("a=b", &mut table).unwrap();
        let out = solve_blind(&eq, &small_caps(), &mut table).unwrap();
        assert!(matches!(out.verdict, Verdict::UnsatWithinBounds { .. }));
        assert_eq!(out.stats.nodes, 1);
    }

    #[test]
    fn variable_only_equation_is_sat() {
        let (verdict, _) = solve("XY=YX", &small_caps());
        assert!(verdict.is_sat());
    }

    #[test]
    fn forced_empty_image() {
        let (verdict, _) = solve("Xa=a", &small_caps());
        match verdict {
            Verdict::Sat(w) => {
                let x = w.vars().next().unwrap();
                assert_eq!(w.get(x).unwrap().len(), 0);
            }
            other => panic!("expected SAT, got {other:?}"),
        }
    }

    #[test]
    fn sat_witnesses_verify() {
        for text in ["abX=Xab", "XaY=aYX", "XX=aabaab", "aX=Xa", "XabY=abYX"] {
            let mut table = SymbolTable::new();
            let eq = parse_equation(text, &mut table).unwrap();
            let out = solve_blind(&eq, &SolverConfig::default(), &mut table).unwrap();
            match out.verdict {
                Verdict::Sat(w) => {
                    assert!(check_solution(&eq, &w, &table).unwrap(), "{text}");
                }
                other => panic!("{text}: expected SAT, got {other:?}"),
            }
        }
    }

    #[test]
    fn node_budget_reports_unknown() {
        let cfg = SolverConfig {
            node_budget: Some(3),
            ..SolverConfig::default()
        };
        let (verdict, _) = solve("aXbY=YbXa", &cfg);
        assert!(matches!(verdict, Verdict::Unknown { .. }));
    }

    #[test]
    fn verdicts_do_not_depend_on_cache_warmth() {
        let cfg = SolverConfig {
            max_phases: 6,
            max_block_exponent: 4,
            ..SolverConfig::default()
        };
        let texts = ["aXY=YXb", "aX=Xa", "XabY=abYX", "XaY=YbX", "XY=YX", "aXY=YXb"];
        let mut shared = SearchCache::new();
        for text in texts {
            let mut t1 = SymbolTable::new();
            let eq1 = parse_equation(text, &mut t1).unwrap();
            let cold = solve_blind(&eq1, &cfg, &mut t1).unwrap();
            let mut t2 = SymbolTable::new();
            let eq2 = parse_equation(text, &mut t2).unwrap();
            let warm = solve_blind_with_cache(&eq2, &cfg, &mut t2, &mut shared).unwrap();
            assert_eq!(cold.verdict.is_sat(), warm.verdict.is_sat(), "{text}");
        }
    }

    #[test]
    fn memoized_search_terminates_on_flexible_unsat() {
        // no ground contradiction ever arises here; only the canonical-form
        // memo keeps the bounded tree tractable
        let cfg = SolverConfig {
            max_phases: 8,
            max_block_exponent: 6,
            ..SolverConfig::default()
        };
        let (verdict, _) = solve("aXY=YXb", &cfg);
        assert!(matches!(verdict, Verdict::UnsatWithinBounds { .. }));
    }
}
