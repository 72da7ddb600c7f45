//! Guided execution: every nondeterministic choice is read off a known
//! solution, which turns the solver into a measuring instrument.
//!
//! The shadow solution is advanced in lock-step with the equation: pops
//! strip image prefixes/suffixes, compressions are replayed inside the
//! images with the same fresh-letter tables. After every rewrite the
//! advanced solution must still solve the equation; any mismatch aborts
//! the run as a desync, since it can only mean a broken rewrite.

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::config::{PartitionMode, SolverConfig};
use crate::depfactor::Side;
use crate::depstate::{
    compute_potentials, compute_sup, side_index, verify_invariants, InputInfo, Potentials,
};
use crate::derivation::{reconstruct_witness, DerivationLog};
use crate::encoding::rebuild_after_step;
use crate::equation::{check_solution, materialize_side, Equation, Substitution};
use crate::error::{Result, SolverError};
use crate::metrics::{h, PhaseEnd, PhaseMetrics, RunMetrics, StepRecord};
use crate::recompress::{
    block_compress_equation, block_compress_str, canonical_schedule, pair_compress_equation,
    pair_compress_str, pop_blocks, pop_letters, remove_variable, BlockPopGuess, CoverageState,
    ExtensionReport, PairPopGuess, Partition,
};
use crate::strategy::{
    classify, compute_sums, greedy_coverage_partition, BlockFlags, Target, TargetCycle,
};
use crate::symbol::{SymbolId, SymbolTable};

/// Outcome of a guided run.
#[derive(Debug)]
pub struct GuidedOutcome {
    pub witness: Substitution,
    pub phases: u32,
    pub metrics: RunMetrics,
    pub log: DerivationLog,
}

/// Reads the block-stage guess off an image: maximal uniform prefix, then
/// the maximal uniform suffix of the remainder.
pub fn derive_block_guess(image: &[SymbolId]) -> Option<BlockPopGuess> {
    let first = *image.first()?;
    let mut prefix_len = 1u64;
    while (prefix_len as usize) < image.len() && image[prefix_len as usize] == first {
        prefix_len += 1;
    }
    let rest = &image[prefix_len as usize..];
    if rest.is_empty() {
        return Some(BlockPopGuess {
            first,
            prefix_len,
            suffix: None,
            becomes_empty: true,
        });
    }
    let last = *rest.last().unwrap();
    let mut r = 1u64;
    while (r as usize) < rest.len() && rest[rest.len() - 1 - r as usize] == last {
        r += 1;
    }
    Some(BlockPopGuess {
        first,
        prefix_len,
        suffix: Some((last, r)),
        becomes_empty: prefix_len as usize + r as usize == image.len(),
    })
}

/// Reads the pair-stage guess off an image under a partition: pop the first
/// letter when it lies in the right class, then the last letter of what
/// remains when it lies in the left class.
pub fn derive_pair_guess(image: &[SymbolId], partition: &Partition) -> PairPopGuess {
    let mut left = None;
    let mut idx_start = 0;
    if let Some(&b) = image.first() {
        if partition.right.contains(&b) {
            left = Some(b);
            idx_start = 1;
        }
    }
    let rest = &image[idx_start..];
    if rest.is_empty() {
        return PairPopGuess {
            left,
            right: None,
            becomes_empty: left.is_some(),
        };
    }
    let mut right = None;
    let mut consumed = 0;
    let a = *rest.last().unwrap();
    if partition.left.contains(&a) {
        right = Some(a);
        consumed = 1;
    }
    PairPopGuess {
        left,
        right,
        becomes_empty: consumed == rest.len(),
    }
}

/// Per-phase counters over basic positions: sup-set size at phase start,
/// popped units, extension units.
struct PhaseCounters {
    k: [Vec<u64>; 2],
    p: [Vec<u64>; 2],
    e: [Vec<u64>; 2],
}

impl PhaseCounters {
    fn new(input: &InputInfo) -> Self {
        let shape = [
            vec![0u64; input.position_count(Side::Lhs)],
            vec![0u64; input.position_count(Side::Rhs)],
        ];
        PhaseCounters {
            k: shape.clone(),
            p: shape.clone(),
            e: shape,
        }
    }

    fn sum_h(counters: &[Vec<u64>; 2]) -> f64 {
        counters
            .iter()
            .flat_map(|v| v.iter())
            .map(|&x| h(x))
            .sum()
    }

    fn total(counters: &[Vec<u64>; 2]) -> u64 {
        counters.iter().flat_map(|v| v.iter()).sum()
    }
}

struct GuidedRun<'t> {
    table: &'t mut SymbolTable,
    cfg: SolverConfig,
    input: InputInfo,
    original: Equation,
    eq: Equation,
    sigma: Substitution,
    log: DerivationLog,
    metrics: RunMetrics,
    rng: ChaCha12Rng,
    phase: u32,
    check_depfactor_invariants: bool,
}

/// Runs the solver with all choices derived from `sigma`, which must solve
/// `eq`. Returns the reconstructed witness and the full measurement trace.
pub fn solve_guided(
    eq: &Equation,
    sigma: &Substitution,
    cfg: &SolverConfig,
    table: &mut SymbolTable,
) -> Result<GuidedOutcome> {
    cfg.validate()?;
    if !check_solution(eq, sigma, table)? {
        return Err(SolverError::NotASolution(eq.render(table)));
    }
    let input = InputInfo::new(eq, table)?;
    let sigma = normalize_solution(eq, sigma, table)?;
    debug_assert!(check_solution(eq, &sigma, table)?);

    let metrics = RunMetrics::new(input.abs0, input.abs0_no_markers);
    let rng = ChaCha12Rng::seed_from_u64(cfg.rng_seed);
    let run = GuidedRun {
        table,
        cfg: cfg.clone(),
        input,
        original: eq.clone(),
        eq: eq.clone(),
        sigma,
        log: DerivationLog::new(),
        metrics,
        rng,
        phase: 0,
        check_depfactor_invariants: true,
    };
    run.drive()
}

/// Restricts a solution to the equation's letters: letters outside the
/// current alphabet map to its least letter, and to the empty image when
/// the equation has no letters at all.
pub fn normalize_solution(
    eq: &Equation,
    sigma: &Substitution,
    table: &SymbolTable,
) -> Result<Substitution> {
    let gamma = eq.alphabet(table);
    let mut out = Substitution::new();
    match gamma.iter().next() {
        Some(&fixed) => {
            for (var, image) in sigma.iter() {
                let mapped = image
                    .iter()
                    .map(|s| if gamma.contains(s) { *s } else { fixed })
                    .collect();
                out.set(var, mapped);
            }
        }
        None => {
            for (var, _) in sigma.iter() {
                out.set(var, Vec::new());
            }
        }
    }
    Ok(out)
}

impl<'t> GuidedRun<'t> {
    fn drive(mut self) -> Result<GuidedOutcome> {
        while self.eq.side_len(Side::Lhs) > 1 || self.eq.side_len(Side::Rhs) > 1 {
            if self.phase >= self.cfg.max_phases {
                return Err(SolverError::PhaseCapExceeded(self.cfg.max_phases));
            }
            self.phase += 1;
            self.run_phase()?;
        }
        let mut terminal = BTreeMap::new();
        for var in self.eq.variables() {
            let image = self.sigma.get(var).unwrap_or(&[]).to_vec();
            terminal.insert(var, image);
        }
        let witness = reconstruct_witness(&self.log, &terminal, self.table)?;
        if !check_solution(&self.original, &witness, self.table)? {
            return Err(SolverError::Invariant(
                "reconstructed witness does not solve the input equation".into(),
            ));
        }
        Ok(GuidedOutcome {
            witness,
            phases: self.phase,
            metrics: self.metrics,
            log: self.log,
        })
    }

    fn run_phase(&mut self) -> Result<()> {
        let phase = self.phase;
        let gamma = self.eq.alphabet(self.table);
        let gamma_sorted: Vec<SymbolId> = gamma.iter().copied().collect();
        // the phase's compressions only cover pairs over the snapshot
        // alphabet, so image letters outside it must be renamed first or
        // the expansion would stop shrinking
        self.sigma = normalize_solution(&self.eq, &self.sigma, self.table)?;
        self.desync_check("normalize")?;
        let mut counters = PhaseCounters::new(&self.input);
        let sup = compute_sup(&self.eq, &self.input);
        for side in [Side::Lhs, Side::Rhs] {
            for pos in 0..self.input.position_count(side) as u32 {
                counters.k[side_index(side)][pos as usize] = sup.count(side, pos);
            }
        }
        let pots_start = compute_potentials(&self.eq, &self.input);
        self.metrics.phases.push(PhaseMetrics {
            phase,
            steps: Vec::new(),
            end: None,
        });

        // variables whose image is already empty are dropped before popping
        for var in self.eq.variables() {
            if self.sigma.get(var).map(|im| im.is_empty()).unwrap_or(false) {
                remove_variable(&mut self.eq, var, phase, &mut self.log);
                self.sigma.remove(var);
            }
        }
        self.after_step("eps", None, &gamma, None, true, &pots_start)?;

        // block stage
        let mut guesses: BTreeMap<SymbolId, BlockPopGuess> = BTreeMap::new();
        for var in self.eq.variables() {
            let image = self.sigma.get(var).expect("image for live variable");
            let guess = derive_block_guess(image).expect("non-empty image");
            guesses.insert(var, guess);
        }
        for side in [Side::Lhs, Side::Rhs] {
            for occ in self.eq.side(side) {
                if let Some(g) = guesses.get(&occ.sym) {
                    let pos = occ.dep.min_pos() as usize;
                    counters.p[side_index(side)][pos] += 1;
                    if g.suffix.is_some() {
                        counters.p[side_index(side)][pos] += 1;
                    }
                }
            }
        }
        pop_blocks(&mut self.eq, &guesses, phase, self.table, &mut self.log)?;
        for (&var, g) in &guesses {
            if g.becomes_empty {
                self.sigma.remove(var);
            } else {
                let image = self.sigma.get_mut(var).unwrap();
                let suffix_len = g.suffix.map(|(_, r)| r).unwrap_or(0) as usize;
                let keep = g.prefix_len as usize..image.len() - suffix_len;
                *image = image[keep].to_vec();
            }
        }
        self.after_step("pop-blocks", None, &gamma, None, false, &pots_start)?;

        let report = block_compress_equation(&mut self.eq, &gamma, phase, self.table, &mut self.log)?;
        self.bump_extensions(&mut counters, &report);
        for var in self.eq.variables() {
            let image = self.sigma.get(var).unwrap().to_vec();
            let compressed = block_compress_str(&image, &gamma, phase, self.table, &mut self.log);
            self.sigma.set(var, compressed);
        }
        self.assert_no_adjacent_equal(&gamma)?;
        self.after_step("block-compress", None, &gamma, None, true, &pots_start)?;

        // pair-compression rounds until every ordered pair is covered
        let mut coverage = CoverageState::new(&gamma);
        let mut cycle = TargetCycle::new();
        let schedule = canonical_schedule(&gamma_sorted);
        let mut prev_flags: Option<BlockFlags> = None;
        let mut pops_after_blocked: BTreeMap<(SymbolId, bool), u64> = BTreeMap::new();
        let mut step = 0u32;
        while !coverage.is_complete() {
            if step as usize > schedule.len() + 4 * 64 + 64 {
                return Err(SolverError::Invariant(
                    "phase failed to reach full pair coverage".into(),
                ));
            }
            let flags = classify(
                &self.eq,
                &self.sigma,
                &gamma,
                &self.input,
                self.cfg.new_letter_mode,
                phase,
                self.table,
            )?;
            if let Some(prev) = &prev_flags {
                flags.assert_monotone_from(prev)?;
            }
            let sums = compute_sums(&flags, &self.eq, &self.input);
            let target = cycle.next();
            let (partition, halving_goal) = match self.cfg.partition_mode {
                PartitionMode::Canonical => {
                    let p = schedule
                        .get(step as usize)
                        .cloned()
                        .ok_or_else(|| {
                            SolverError::Invariant(
                                "canonical schedule exhausted before coverage".into(),
                            )
                        })?;
                    (p, None)
                }
                PartitionMode::Strategy => {
                    let pre = sums.get(target);
                    if pre > 0 {
                        let p = self.find_halving_partition(
                            &gamma_sorted,
                            &gamma,
                            phase,
                            step,
                            target,
                            pre,
                        )?;
                        (p, Some(pre))
                    } else {
                        (greedy_coverage_partition(&gamma_sorted, &coverage)?, None)
                    }
                }
            };

            // pair pops under this partition
            let mut pair_guesses: BTreeMap<SymbolId, PairPopGuess> = BTreeMap::new();
            for var in self.eq.variables() {
                let image = self.sigma.get(var).expect("image for live variable");
                let guess = derive_pair_guess(image, &partition);
                if guess.left.is_some() || guess.right.is_some() {
                    pair_guesses.insert(var, guess);
                }
            }
            for (&var, g) in &pair_guesses {
                for (popped, left_side) in [(g.left, true), (g.right, false)] {
                    if popped.is_none() {
                        continue;
                    }
                    let blocked = if left_side {
                        flags.var_left.get(&var).copied().unwrap_or(false)
                    } else {
                        flags.var_right.get(&var).copied().unwrap_or(false)
                    };
                    if blocked {
                        let count = pops_after_blocked.entry((var, left_side)).or_insert(0);
                        *count += 1;
                        if *count > 1 {
                            return Err(SolverError::Invariant(format!(
                                "variable {} popped twice after becoming blocked",
                                self.table.display(var)
                            )));
                        }
                    }
                }
            }
            for side in [Side::Lhs, Side::Rhs] {
                for occ in self.eq.side(side) {
                    if let Some(g) = pair_guesses.get(&occ.sym) {
                        let pos = occ.dep.min_pos() as usize;
                        let pops =
                            g.left.is_some() as u64 + g.right.is_some() as u64;
                        counters.p[side_index(side)][pos] += pops;
                    }
                }
            }
            pop_letters(
                &mut self.eq,
                &partition,
                &pair_guesses,
                phase,
                self.table,
                &mut self.log,
            )?;
            for (&var, g) in &pair_guesses {
                if g.becomes_empty {
                    self.sigma.remove(var);
                } else {
                    let image = self.sigma.get_mut(var).unwrap();
                    let from = g.left.is_some() as usize;
                    let to = image.len() - g.right.is_some() as usize;
                    *image = image[from..to].to_vec();
                }
            }
            self.after_step(
                "pop-letters",
                Some(step),
                &gamma,
                Some(coverage.remaining() as u64),
                false,
                &pots_start,
            )?;

            let report = pair_compress_equation(
                &mut self.eq,
                &partition,
                phase,
                step,
                self.table,
                &mut self.log,
                &mut coverage,
            )?;
            self.bump_extensions(&mut counters, &report);
            for var in self.eq.variables() {
                let image = self.sigma.get(var).unwrap().to_vec();
                let compressed = pair_compress_str(
                    &image,
                    &partition,
                    phase,
                    step,
                    self.table,
                    &mut self.log,
                )?;
                self.sigma.set(var, compressed);
            }
            self.after_step(
                "pair-compress",
                Some(step),
                &gamma,
                Some(coverage.remaining() as u64),
                true,
                &pots_start,
            )?;

            if let Some(pre) = halving_goal {
                let post_flags = classify(
                    &self.eq,
                    &self.sigma,
                    &gamma,
                    &self.input,
                    self.cfg.new_letter_mode,
                    phase,
                    self.table,
                )?;
                let post = compute_sums(&post_flags, &self.eq, &self.input).get(target);
                if post * 2 > pre {
                    return Err(SolverError::Invariant(format!(
                        "committed partition failed to halve target {target:?}: {pre} -> {post}"
                    )));
                }
            }
            prev_flags = Some(flags);
            step += 1;
        }

        // end-of-phase accounting and the per-phase shrink requirements
        let pots_end = compute_potentials(&self.eq, &self.input);
        let abs0 = self.input.abs0;
        let sum_h_p = PhaseCounters::sum_h(&counters.p);
        let sum_h_e = PhaseCounters::sum_h(&counters.e);
        let end = PhaseEnd {
            phase,
            h_d_start: pots_start.h_d,
            h_n_start: pots_start.h_n,
            h_d_end: pots_end.h_d,
            h_n_end: pots_end.h_n,
            sum_h_p,
            sum_h_e,
            sum_k: PhaseCounters::total(&counters.k),
            sum_p: PhaseCounters::total(&counters.p),
            sum_e: PhaseCounters::total(&counters.e),
            partitions: step,
        };
        self.metrics.phases.last_mut().unwrap().end = Some(end);

        if 3 * pots_end.h_d > 2 * pots_start.h_d + 123 * abs0 {
            return Err(SolverError::Invariant(format!(
                "phase {phase}: depfactor potential did not shrink: {} -> {}",
                pots_start.h_d, pots_end.h_d
            )));
        }
        if 6.0 * pots_end.h_n > 5.0 * pots_start.h_n + 6.0 * 15540.0 * abs0 as f64 {
            return Err(SolverError::Invariant(format!(
                "phase {phase}: index potential did not shrink: {} -> {}",
                pots_start.h_n, pots_end.h_n
            )));
        }
        if sum_h_p > 129.0 * abs0 as f64 {
            return Err(SolverError::Invariant(format!(
                "phase {phase}: popped-unit cost {sum_h_p} exceeds 129 * {abs0}"
            )));
        }
        if sum_h_e > 129.0 * abs0 as f64 {
            return Err(SolverError::Invariant(format!(
                "phase {phase}: extension-unit cost {sum_h_e} exceeds 129 * {abs0}"
            )));
        }
        Ok(())
    }

    fn bump_extensions(&self, counters: &mut PhaseCounters, report: &ExtensionReport) {
        for &(side, pos) in report {
            counters.e[side_index(side)][pos as usize] += 1;
        }
    }

    /// Searches for a partition whose application at least halves the
    /// targeted sum; exhaustive over small alphabets, sampled otherwise.
    fn find_halving_partition(
        &mut self,
        gamma_sorted: &[SymbolId],
        gamma: &BTreeSet<SymbolId>,
        phase: u32,
        step: u32,
        target: Target,
        pre: u64,
    ) -> Result<Partition> {
        let m = gamma_sorted.len();
        let try_partition = |run: &mut Self, p: &Partition| -> Result<bool> {
            let post = run.simulate_partition(p, gamma, phase, step, target)?;
            Ok(post * 2 <= pre)
        };
        if m <= 16 {
            for mask in 0u32..(1u32 << m) {
                let p = partition_from_mask(gamma_sorted, mask as u64);
                if try_partition(self, &p)? {
                    return Ok(p);
                }
            }
        } else {
            for _ in 0..64 * m {
                let mut left = BTreeSet::new();
                let mut right = BTreeSet::new();
                for &sym in gamma_sorted {
                    if self.rng.random_bool(0.5) {
                        right.insert(sym);
                    } else {
                        left.insert(sym);
                    }
                }
                let p = Partition { left, right };
                if try_partition(self, &p)? {
                    return Ok(p);
                }
            }
        }
        Err(SolverError::NoHalvingPartition(format!(
            "target {target:?} at {pre} over {m} letters"
        )))
    }

    /// Applies a candidate partition on scratch copies and returns the
    /// value of the targeted sum afterwards.
    fn simulate_partition(
        &mut self,
        partition: &Partition,
        gamma: &BTreeSet<SymbolId>,
        phase: u32,
        step: u32,
        target: Target,
    ) -> Result<u64> {
        let mut eq = self.eq.clone();
        let mut sigma = self.sigma.clone();
        let mut scratch_log = DerivationLog::new();
        let mut scratch_coverage = CoverageState::new(&BTreeSet::new());

        let mut pair_guesses: BTreeMap<SymbolId, PairPopGuess> = BTreeMap::new();
        for var in eq.variables() {
            let image = sigma.get(var).expect("image for live variable");
            let guess = derive_pair_guess(image, partition);
            if guess.left.is_some() || guess.right.is_some() {
                pair_guesses.insert(var, guess);
            }
        }
        pop_letters(&mut eq, partition, &pair_guesses, phase, self.table, &mut scratch_log)?;
        for (&var, g) in &pair_guesses {
            if g.becomes_empty {
                sigma.remove(var);
            } else {
                let image = sigma.get_mut(var).unwrap();
                let from = g.left.is_some() as usize;
                let to = image.len() - g.right.is_some() as usize;
                *image = image[from..to].to_vec();
            }
        }
        pair_compress_equation(
            &mut eq,
            partition,
            phase,
            step,
            self.table,
            &mut scratch_log,
            &mut scratch_coverage,
        )?;
        for var in eq.variables() {
            let image = sigma.get(var).unwrap().to_vec();
            let compressed =
                pair_compress_str(&image, partition, phase, step, self.table, &mut scratch_log)?;
            sigma.set(var, compressed);
        }
        let flags = classify(
            &eq,
            &sigma,
            gamma,
            &self.input,
            self.cfg.new_letter_mode,
            phase,
            self.table,
        )?;
        Ok(compute_sums(&flags, &eq, &self.input).get(target))
    }

    /// Records a step and runs the always-on consistency checks.
    fn after_step(
        &mut self,
        label: &str,
        partition: Option<u32>,
        gamma: &BTreeSet<SymbolId>,
        uncovered: Option<u64>,
        settled: bool,
        pots_start: &Potentials,
    ) -> Result<()> {
        self.desync_check(label)?;
        if self.check_depfactor_invariants {
            let violations = verify_invariants(&self.eq, &self.input, self.table);
            if !violations.is_empty() {
                return Err(SolverError::Invariant(format!(
                    "{label}: {}",
                    violations.join("; ")
                )));
            }
        }
        let codes = rebuild_after_step(&self.eq, self.table)?;
        let pots = compute_potentials(&self.eq, &self.input);
        let flags = classify(
            &self.eq,
            &self.sigma,
            gamma,
            &self.input,
            self.cfg.new_letter_mode,
            self.phase,
            self.table,
        )?;
        let sums = compute_sums(&flags, &self.eq, &self.input);
        let uncovered = uncovered.unwrap_or_else(|| {
            let m = gamma.len() as u64;
            m * m.saturating_sub(1)
        });
        let record = StepRecord {
            phase: self.phase,
            step: label.to_string(),
            partition,
            len_u: self.eq.side_len(Side::Lhs) as u64,
            len_v: self.eq.side_len(Side::Rhs) as u64,
            letter_bits: codes.letter_bits,
            variable_bits: codes.variable_bits,
            total_bits: codes.total_bits(),
            dep_bits: pots.dep_encoding_bits,
            h_d: pots.h_d,
            h_n: pots.h_n,
            s_a: sums.a,
            s_b: sums.b,
            s_c: sums.c,
            s_d: sums.d,
            uncovered,
            settled,
        };
        if codes.total_bits() > self.cfg.space_cap_bits {
            return Err(SolverError::SpaceCapExceeded {
                used: codes.total_bits(),
                cap: self.cfg.space_cap_bits,
            });
        }
        // the encoding chain must hold at every recorded step
        if codes.letter_bits > pots.dep_encoding_bits {
            return Err(SolverError::Invariant(format!(
                "{label}: letter bits {} exceed depfactor encoding {}",
                codes.letter_bits, pots.dep_encoding_bits
            )));
        }
        if (pots.dep_encoding_bits as f64) > pots.h_d as f64 + pots.h_n + 1e-9 {
            return Err(SolverError::Invariant(format!(
                "{label}: depfactor encoding {} exceeds potential bound {}",
                pots.dep_encoding_bits,
                pots.h_d as f64 + pots.h_n
            )));
        }
        // settled states stay inside the intra-phase envelope
        if settled {
            let bound =
                8.0 * (pots_start.h_d as f64 + pots_start.h_n) + 2104.0 * self.input.abs0 as f64;
            if pots.h_d as f64 + pots.h_n > bound {
                return Err(SolverError::Invariant(format!(
                    "{label}: potential {} exceeds intra-phase envelope {bound}",
                    pots.h_d as f64 + pots.h_n
                )));
            }
        }
        self.metrics.phases.last_mut().unwrap().steps.push(record);
        Ok(())
    }

    fn desync_check(&self, label: &str) -> Result<()> {
        let u = materialize_side(&self.eq.lhs, &self.sigma, self.table)
            .map_err(|e| SolverError::Desync(format!("{label}: {e}")))?;
        let v = materialize_side(&self.eq.rhs, &self.sigma, self.table)
            .map_err(|e| SolverError::Desync(format!("{label}: {e}")))?;
        if u != v {
            return Err(SolverError::Desync(format!(
                "{label}: {} vs {}",
                self.table.render(&u),
                self.table.render(&v)
            )));
        }
        Ok(())
    }

    /// After block compression the expanded sides may not contain two equal
    /// adjacent phase-start letters.
    fn assert_no_adjacent_equal(&self, gamma: &BTreeSet<SymbolId>) -> Result<()> {
        let u = materialize_side(&self.eq.lhs, &self.sigma, self.table)?;
        for w in u.windows(2) {
            if w[0] == w[1] && gamma.contains(&w[0]) {
                return Err(SolverError::Invariant(format!(
                    "adjacent equal letters {} after block compression",
                    self.table.display(w[0])
                )));
            }
        }
        Ok(())
    }
}

fn partition_from_mask(gamma_sorted: &[SymbolId], mask: u64) -> Partition {
    let mut left = BTreeSet::new();
    let mut right = BTreeSet::new();
    for (i, &sym) in gamma_sorted.iter().enumerate() {
        if mask >> i & 1 == 1 {
            right.insert(sym);
        } else {
            left.insert(sym);
        }
    }
    Partition { left, right }
}

/// Upper bound on guided phases for a solution of expanded length `n`:
/// one full phase shrinks the expansion to at most `(2n + 1) / 3`.
pub fn phase_bound(n: u64) -> u32 {
    let n = n.max(1);
    let mut k = 0u32;
    let mut val = 1.0f64;
    while val < n as f64 {
        val *= 1.5;
        k += 1;
    }
    k + 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::parse_equation;

    fn image(table: &mut SymbolTable, text: &str) -> Vec<SymbolId> {
        text.chars().map(|c| table.intern_char(c).unwrap()).collect()
    }

    #[test]
    fn block_guess_reads_maximal_runs() {
        let mut table = SymbolTable::new();
        let w = image(&mut table, "aab");
        let g = derive_block_guess(&w).unwrap();
        assert_eq!(g.prefix_len, 2);
        assert_eq!(g.suffix.map(|(_, r)| r), Some(1));
        assert!(g.becomes_empty);

        let w = image(&mut table, "aba");
        let g = derive_block_guess(&w).unwrap();
        assert_eq!(g.prefix_len, 1);
        assert_eq!(g.suffix.map(|(_, r)| r), Some(1));
        assert!(!g.becomes_empty);

        let w = image(&mut table, "a");
        let g = derive_block_guess(&w).unwrap();
        assert_eq!(g.prefix_len, 1);
        assert_eq!(g.suffix, None);
        assert!(g.becomes_empty);
    }

    #[test]
    fn pair_guess_reads_partition_membership() {
        let mut table = SymbolTable::new();
        let a = table.intern_char('a').unwrap();
        let b = table.intern_char('b').unwrap();
        let p = Partition::new([a].into(), [b].into()).unwrap();

        let w = image(&mut table, "bab");
        let g = derive_pair_guess(&w, &p);
        assert_eq!(g.left, Some(b));
        assert_eq!(g.right, None);
        assert!(!g.becomes_empty);

        let w = image(&mut table, "ba");
        let g = derive_pair_guess(&w, &p);
        assert_eq!(g.left, Some(b));
        assert_eq!(g.right, Some(a));
        assert!(g.becomes_empty);

        let w = image(&mut table, "cc");
        let g = derive_pair_guess(&w, &p);
        assert_eq!(g.left, None);
        assert_eq!(g.right, None);
    }

    #[test]
    fn guided_solves_commutation() {
        let mut table = SymbolTable::new();
        let eq = parse_equation("aX=Xa", &mut table).unwrap();
        let a = table.intern_char('a').unwrap();
        let x = table.intern_char('X').unwrap();
        let mut sigma = Substitution::new();
        sigma.set(x, vec![a]);
        let out = solve_guided(&eq, &sigma, &SolverConfig::default(), &mut table).unwrap();
        assert!(out.phases <= 2);
        assert!(check_solution(&eq, &out.witness, &table).unwrap());
    }

    #[test]
    fn guided_on_trivial_equation_uses_no_phase() {
        let mut table = SymbolTable::new();
        let eq = parse_equation("a=a", &mut table).unwrap();
        let out = solve_guided(&eq, &Substitution::new(), &SolverConfig::default(), &mut table)
            .unwrap();
        assert_eq!(out.phases, 0);
    }

    #[test]
    fn guided_rejects_non_solution() {
        let mut table = SymbolTable::new();
        let eq = parse_equation("aX=Xb", &mut table).unwrap();
        let x = table.intern_char('X').unwrap();
        let mut sigma = Substitution::new();
        sigma.set(x, vec![]);
        assert!(matches!(
            solve_guided(&eq, &sigma, &SolverConfig::default(), &mut table),
            Err(SolverError::NotASolution(_))
        ));
    }

    #[test]
    fn phase_bound_values() {
        assert_eq!(phase_bound(1), 2);
        assert_eq!(phase_bound(2), 4); // ceil(log1.5 2) = 2
        assert!(phase_bound(2000) <= 21);
    }
}
