//! Symbol interning.
//!
//! Every letter, variable and the end marker is an interned [`SymbolId`].
//! Input symbols come from the text format (lowercase letters, uppercase
//! variables); compression allocates fresh letters on top of those. Fresh
//! letters are memoized per (phase, shape) so that equal blocks or pairs
//! compressed at the same point of the algorithm map to the same id, while
//! ids from different phases never collide with letters already present in
//! the equation.

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Result, SolverError};

/// Interned symbol handle. Ordering follows creation order, which puts the
/// input alphabet before all fresh letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Letter,
    Variable,
    EndMarker,
}

/// Where a symbol came from. Fresh letters remember the phase that created
/// them; the strategy uses this to tell "new" letters from phase-start ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolOrigin {
    Input,
    PairFresh(u32),
    BlockFresh(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Shape {
    Marker,
    Input(char),
    /// Fresh letter standing for `letter` repeated `exp` times.
    Block { letter: SymbolId, exp: u64 },
    /// Fresh letter standing for the two-letter string `left right`.
    Pair { left: SymbolId, right: SymbolId },
}

#[derive(Debug, Clone)]
struct SymbolInfo {
    kind: SymbolKind,
    origin: SymbolOrigin,
    display: String,
    shape: Shape,
}

/// The end marker framing each side of an equation.
pub const MARKER: SymbolId = SymbolId(0);

#[derive(Debug, Clone)]
pub struct SymbolTable {
    infos: Vec<SymbolInfo>,
    by_char: HashMap<char, SymbolId>,
    block_memo: HashMap<(u32, SymbolId, u64), SymbolId>,
    pair_memo: HashMap<(u32, u32, SymbolId, SymbolId), SymbolId>,
    expansion_memo: HashMap<SymbolId, Rc<[SymbolId]>>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub fn new() -> Self {
        let mut t = SymbolTable {
            infos: Vec::new(),
            by_char: HashMap::new(),
            block_memo: HashMap::new(),
            pair_memo: HashMap::new(),
            expansion_memo: HashMap::new(),
        };
        let id = t.push(SymbolInfo {
            kind: SymbolKind::EndMarker,
            origin: SymbolOrigin::Input,
            display: "@".to_string(),
            shape: Shape::Marker,
        });
        debug_assert_eq!(id, MARKER);
        t
    }

    fn push(&mut self, info: SymbolInfo) -> SymbolId {
        let id = SymbolId(self.infos.len() as u32);
        self.infos.push(info);
        id
    }

    /// Interns a text-format token: lowercase letters, uppercase variables.
    pub fn intern_char(&mut self, c: char) -> Result<SymbolId> {
        if let Some(&id) = self.by_char.get(&c) {
            return Ok(id);
        }
        let kind = if c.is_ascii_lowercase() {
            SymbolKind::Letter
        } else if c.is_ascii_uppercase() {
            SymbolKind::Variable
        } else {
            return Err(SolverError::Parse(format!("illegal character {c:?}")));
        };
        let id = self.push(SymbolInfo {
            kind,
            origin: SymbolOrigin::Input,
            display: c.to_string(),
            shape: Shape::Input(c),
        });
        self.by_char.insert(c, id);
        Ok(id)
    }

    /// Fresh letter for the block `letter^exp` compressed in `phase`.
    /// Equal blocks compressed in the same phase share one letter. The
    /// returned flag is true when the letter was newly allocated.
    pub fn fresh_block(&mut self, phase: u32, letter: SymbolId, exp: u64) -> (SymbolId, bool) {
        debug_assert!(exp >= 2);
        if let Some(&id) = self.block_memo.get(&(phase, letter, exp)) {
            return (id, false);
        }
        let display = format!("#{}", self.infos.len());
        let id = self.push(SymbolInfo {
            kind: SymbolKind::Letter,
            origin: SymbolOrigin::BlockFresh(phase),
            display,
            shape: Shape::Block { letter, exp },
        });
        self.block_memo.insert((phase, letter, exp), id);
        (id, true)
    }

    /// Fresh letter for the pair `left right` compressed by the `step`-th
    /// partition of `phase`. Equal pairs within one compression call share
    /// one letter; distinct calls allocate distinct letters.
    pub fn fresh_pair(
        &mut self,
        phase: u32,
        step: u32,
        left: SymbolId,
        right: SymbolId,
    ) -> (SymbolId, bool) {
        if let Some(&id) = self.pair_memo.get(&(phase, step, left, right)) {
            return (id, false);
        }
        let display = format!("#{}", self.infos.len());
        let id = self.push(SymbolInfo {
            kind: SymbolKind::Letter,
            origin: SymbolOrigin::PairFresh(phase),
            display,
            shape: Shape::Pair { left, right },
        });
        self.pair_memo.insert((phase, step, left, right), id);
        (id, true)
    }

    pub fn kind(&self, id: SymbolId) -> SymbolKind {
        self.infos[id.index()].kind
    }

    pub fn origin(&self, id: SymbolId) -> SymbolOrigin {
        self.infos[id.index()].origin
    }

    pub fn is_letter(&self, id: SymbolId) -> bool {
        self.kind(id) == SymbolKind::Letter
    }

    pub fn is_variable(&self, id: SymbolId) -> bool {
        self.kind(id) == SymbolKind::Variable
    }

    pub fn is_marker(&self, id: SymbolId) -> bool {
        id == MARKER
    }

    pub fn display(&self, id: SymbolId) -> &str {
        &self.infos[id.index()].display
    }

    pub fn len(&self) -> usize {
        self.infos.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the marker always exists
    }

    /// Expands a letter to the input-alphabet string it stands for.
    /// Input letters expand to themselves.
    pub fn expand(&mut self, id: SymbolId) -> Result<Rc<[SymbolId]>> {
        if let Some(e) = self.expansion_memo.get(&id) {
            return Ok(Rc::clone(e));
        }
        let expansion: Rc<[SymbolId]> = match self.infos[id.index()].shape.clone() {
            Shape::Input(_) => {
                if self.kind(id) != SymbolKind::Letter {
                    return Err(SolverError::DanglingRule(format!(
                        "cannot expand non-letter {}",
                        self.display(id)
                    )));
                }
                Rc::from(vec![id])
            }
            Shape::Marker => {
                return Err(SolverError::DanglingRule("cannot expand end marker".into()))
            }
            Shape::Block { letter, exp } => {
                let inner = self.expand(letter)?;
                let mut out = Vec::with_capacity(inner.len() * exp as usize);
                for _ in 0..exp {
                    out.extend_from_slice(&inner);
                }
                Rc::from(out)
            }
            Shape::Pair { left, right } => {
                let l = self.expand(left)?;
                let r = self.expand(right)?;
                let mut out = Vec::with_capacity(l.len() + r.len());
                out.extend_from_slice(&l);
                out.extend_from_slice(&r);
                Rc::from(out)
            }
        };
        self.expansion_memo.insert(id, Rc::clone(&expansion));
        Ok(expansion)
    }

    /// Render a symbol string with the table's display tokens.
    pub fn render(&self, syms: &[SymbolId]) -> String {
        syms.iter().map(|&s| self.display(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_stable_and_case_determines_kind() {
        let mut t = SymbolTable::new();
        let a = t.intern_char('a').unwrap();
        let x = t.intern_char('X').unwrap();
        assert_eq!(t.intern_char('a').unwrap(), a);
        assert_eq!(t.kind(a), SymbolKind::Letter);
        assert_eq!(t.kind(x), SymbolKind::Variable);
        assert!(t.intern_char('?').is_err());
    }

    #[test]
    fn fresh_letters_are_memoized_per_phase() {
        let mut t = SymbolTable::new();
        let a = t.intern_char('a').unwrap();
        let (b1, _) = t.fresh_block(1, a, 3);
        let (b2, _) = t.fresh_block(1, a, 3);
        let (b3, _) = t.fresh_block(2, a, 3);
        assert_eq!(b1, b2);
        assert_ne!(b1, b3);
        assert_eq!(t.origin(b1), SymbolOrigin::BlockFresh(1));
    }

    #[test]
    fn expansion_goes_back_to_input_letters() {
        let mut t = SymbolTable::new();
        let a = t.intern_char('a').unwrap();
        let b = t.intern_char('b').unwrap();
        let (a3, _) = t.fresh_block(1, a, 3);
        let (c, _) = t.fresh_pair(1, 0, a3, b);
        let e = t.expand(c).unwrap();
        assert_eq!(&*e, &[a, a, a, b]);
    }
}
