//! Derivation logging and witness reconstruction.
//!
//! A run appends records for every pop, removal and fresh-letter rule it
//! performs. Reconstruction inverts the pops: the original image of a
//! variable is the concatenation of its left pops (in pop order), its final
//! image, and its right pops (in reverse pop order), with every letter
//! expanded back to the input alphabet.

use std::collections::BTreeMap;

use crate::equation::Substitution;
use crate::error::Result;
use crate::symbol::{SymbolId, SymbolTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopSide {
    Left,
    Right,
}

#[derive(Debug, Clone)]
pub enum Record {
    Pop {
        var: SymbolId,
        side: PopSide,
        letters: Vec<SymbolId>,
        phase: u32,
    },
    Removed {
        var: SymbolId,
        phase: u32,
    },
    BlockRule {
        fresh: SymbolId,
        letter: SymbolId,
        exp: u64,
        phase: u32,
    },
    PairRule {
        fresh: SymbolId,
        left: SymbolId,
        right: SymbolId,
        phase: u32,
    },
}

#[derive(Debug, Clone, Default)]
pub struct DerivationLog {
    records: Vec<Record>,
}

impl DerivationLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Rolls the log back to a saved length; used by backtracking search.
    pub fn truncate(&mut self, len: usize) {
        self.records.truncate(len);
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        let mut out = String::new();
        for r in &self.records {
            match r {
                Record::Pop {
                    var,
                    side,
                    letters,
                    phase,
                } => {
                    let dir = match side {
                        PopSide::Left => "left",
                        PopSide::Right => "right",
                    };
                    out.push_str(&format!(
                        "phase {phase}: pop {dir} {} <- {}\n",
                        table.display(*var),
                        table.render(letters)
                    ));
                }
                Record::Removed { var, phase } => {
                    out.push_str(&format!("phase {phase}: removed {}\n", table.display(*var)));
                }
                Record::BlockRule {
                    fresh,
                    letter,
                    exp,
                    phase,
                } => {
                    out.push_str(&format!(
                        "phase {phase}: rule {} -> {}^{}\n",
                        table.display(*fresh),
                        table.display(*letter),
                        exp
                    ));
                }
                Record::PairRule {
                    fresh,
                    left,
                    right,
                    phase,
                } => {
                    out.push_str(&format!(
                        "phase {phase}: rule {} -> {}{}\n",
                        table.display(*fresh),
                        table.display(*left),
                        table.display(*right)
                    ));
                }
            }
        }
        out
    }
}

/// Rebuilds the witness for the original equation from a complete log and
/// the final images of the variables still alive at termination.
pub fn reconstruct_witness(
    log: &DerivationLog,
    terminal_images: &BTreeMap<SymbolId, Vec<SymbolId>>,
    table: &mut SymbolTable,
) -> Result<Substitution> {
    let mut left_parts: BTreeMap<SymbolId, Vec<SymbolId>> = BTreeMap::new();
    let mut right_parts: BTreeMap<SymbolId, Vec<SymbolId>> = BTreeMap::new();
    let mut vars: Vec<SymbolId> = Vec::new();
    let note_var = |v: SymbolId, vars: &mut Vec<SymbolId>| {
        if !vars.contains(&v) {
            vars.push(v);
        }
    };
    for r in log.records() {
        match r {
            Record::Pop {
                var, side, letters, ..
            } => {
                note_var(*var, &mut vars);
                match side {
                    PopSide::Left => left_parts.entry(*var).or_default().extend(letters),
                    PopSide::Right => {
                        // reverse pop order: later right pops sit closer to
                        // the remaining image
                        let slot = right_parts.entry(*var).or_default();
                        let mut new_part = letters.clone();
                        new_part.extend(slot.iter());
                        *slot = new_part;
                    }
                }
            }
            Record::Removed { var, .. } => note_var(*var, &mut vars),
            _ => {}
        }
    }
    for &v in terminal_images.keys() {
        note_var(v, &mut vars);
    }

    let mut witness = Substitution::new();
    for var in vars {
        let mut image: Vec<SymbolId> = Vec::new();
        for &s in left_parts.get(&var).map(|v| v.as_slice()).unwrap_or(&[]) {
            image.extend_from_slice(&table.expand(s)?);
        }
        for &s in terminal_images.get(&var).map(|v| v.as_slice()).unwrap_or(&[]) {
            image.extend_from_slice(&table.expand(s)?);
        }
        for &s in right_parts.get(&var).map(|v| v.as_slice()).unwrap_or(&[]) {
            image.extend_from_slice(&table.expand(s)?);
        }
        witness.set(var, image);
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_expand_through_rules() {
        let mut table = SymbolTable::new();
        let a = table.intern_char('a').unwrap();
        let b = table.intern_char('b').unwrap();
        let x = table.intern_char('X').unwrap();
        let (c, _) = table.fresh_pair(1, 0, a, b);
        let mut log = DerivationLog::new();
        log.push(Record::Pop {
            var: x,
            side: PopSide::Left,
            letters: vec![c],
            phase: 1,
        });
        log.push(Record::Removed { var: x, phase: 1 });
        let witness = reconstruct_witness(&log, &BTreeMap::new(), &mut table).unwrap();
        assert_eq!(witness.get(x).unwrap(), &[a, b]);
    }

    #[test]
    fn block_rules_expand_to_powers() {
        let mut table = SymbolTable::new();
        let a = table.intern_char('a').unwrap();
        let x = table.intern_char('X').unwrap();
        let (a3, _) = table.fresh_block(1, a, 3);
        let mut log = DerivationLog::new();
        log.push(Record::Pop {
            var: x,
            side: PopSide::Left,
            letters: vec![a3],
            phase: 2,
        });
        let witness = reconstruct_witness(&log, &BTreeMap::new(), &mut table).unwrap();
        assert_eq!(witness.get(x).unwrap(), &[a, a, a]);
    }

    #[test]
    fn pop_order_is_respected() {
        // image = L1 L2 [final] R2 R1 when pops happened as L1, R1, L2, R2
        let mut table = SymbolTable::new();
        let a = table.intern_char('a').unwrap();
        let b = table.intern_char('b').unwrap();
        let c = table.intern_char('c').unwrap();
        let d = table.intern_char('d').unwrap();
        let e = table.intern_char('e').unwrap();
        let x = table.intern_char('X').unwrap();
        let mut log = DerivationLog::new();
        for (side, letters) in [
            (PopSide::Left, vec![a]),
            (PopSide::Right, vec![b]),
            (PopSide::Left, vec![c]),
            (PopSide::Right, vec![d]),
        ] {
            log.push(Record::Pop {
                var: x,
                side,
                letters,
                phase: 1,
            });
        }
        let mut terminal = BTreeMap::new();
        terminal.insert(x, vec![e]);
        let witness = reconstruct_witness(&log, &terminal, &mut table).unwrap();
        assert_eq!(witness.get(x).unwrap(), &[a, c, e, d, b]);
    }
}
