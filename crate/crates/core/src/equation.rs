//! Equation representation, parsing and substitution.
//!
//! Text format: one line `LHS = RHS` where lowercase ASCII tokens are
//! letters and uppercase tokens are variables. The parser frames each side
//! with end markers; the markers are invisible in the text format and are
//! never counted in reported side lengths.

use std::collections::{BTreeMap, BTreeSet};

use crate::depfactor::{Depfactor, Side};
use crate::error::{Result, SolverError};
use crate::symbol::{SymbolId, SymbolTable, MARKER};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub sym: SymbolId,
    pub dep: Depfactor,
}

/// A word equation `U = V` with marker-framed sides and per-variable
/// occurrence counts. `n_x` keeps removed variables with count zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Vec<Occurrence>,
    pub rhs: Vec<Occurrence>,
    n_x: BTreeMap<SymbolId, u32>,
}

impl Equation {
    pub fn side(&self, side: Side) -> &[Occurrence] {
        match side {
            Side::Lhs => &self.lhs,
            Side::Rhs => &self.rhs,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut Vec<Occurrence> {
        match side {
            Side::Lhs => &mut self.lhs,
            Side::Rhs => &mut self.rhs,
        }
    }

    /// Side length with markers excluded.
    pub fn side_len(&self, side: Side) -> usize {
        self.side(side).len() - 2
    }

    pub fn total_occurrences(&self) -> usize {
        self.side_len(Side::Lhs) + self.side_len(Side::Rhs)
    }

    /// Letters currently present (markers excluded).
    pub fn alphabet(&self, table: &SymbolTable) -> BTreeSet<SymbolId> {
        let mut set = BTreeSet::new();
        for occ in self.lhs.iter().chain(self.rhs.iter()) {
            if table.is_letter(occ.sym) {
                set.insert(occ.sym);
            }
        }
        set
    }

    /// Variables currently present, in id order.
    pub fn variables(&self) -> Vec<SymbolId> {
        self.n_x
            .iter()
            .filter(|&(_, &n)| n > 0)
            .map(|(&v, _)| v)
            .collect()
    }

    pub fn has_variables(&self) -> bool {
        self.n_x.values().any(|&n| n > 0)
    }

    pub fn occurrence_count(&self, var: SymbolId) -> u32 {
        self.n_x.get(&var).copied().unwrap_or(0)
    }

    pub(crate) fn set_occurrence_count(&mut self, var: SymbolId, n: u32) {
        self.n_x.insert(var, n);
    }

    /// Recounts variable occurrences from the sides; used by tests and by
    /// mutation sites to validate the stored counts.
    pub fn recount_variables(&self, table: &SymbolTable) -> BTreeMap<SymbolId, u32> {
        let mut counts: BTreeMap<SymbolId, u32> = BTreeMap::new();
        for (v, _) in self.n_x.iter() {
            counts.insert(*v, 0);
        }
        for occ in self.lhs.iter().chain(self.rhs.iter()) {
            if table.is_variable(occ.sym) {
                *counts.entry(occ.sym).or_insert(0) += 1;
            }
        }
        counts
    }

    pub fn counts_consistent(&self, table: &SymbolTable) -> bool {
        self.recount_variables(table) == self.n_x
    }

    /// True when both sides have at most one symbol besides the markers.
    pub fn is_trivial(&self) -> bool {
        self.side_len(Side::Lhs) <= 1 && self.side_len(Side::Rhs) <= 1
    }

    /// Symbol-wise equality of the two sides.
    pub fn sides_equal(&self) -> bool {
        self.lhs.len() == self.rhs.len()
            && self
                .lhs
                .iter()
                .zip(self.rhs.iter())
                .all(|(a, b)| a.sym == b.sym)
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        let mut out = String::new();
        for occ in &self.lhs[1..self.lhs.len() - 1] {
            out.push_str(table.display(occ.sym));
        }
        out.push_str(" = ");
        for occ in &self.rhs[1..self.rhs.len() - 1] {
            out.push_str(table.display(occ.sym));
        }
        out
    }
}

/// Parses one `LHS = RHS` line. Both sides must be non-empty; markers are
/// inserted and every occurrence (markers included) gets the basic depfactor
/// of its own position.
pub fn parse_equation(text: &str, table: &mut SymbolTable) -> Result<Equation> {
    let mut parts = text.splitn(2, '=');
    let lhs_text = parts.next().unwrap_or("").trim();
    let rhs_text = match parts.next() {
        Some(t) => t.trim(),
        None => return Err(SolverError::Parse("missing '='".into())),
    };
    if rhs_text.contains('=') {
        return Err(SolverError::Parse("more than one '='".into()));
    }
    if lhs_text.is_empty() || rhs_text.is_empty() {
        return Err(SolverError::Parse("empty side".into()));
    }
    let mut parse_side = |text: &str, side: Side| -> Result<Vec<Occurrence>> {
        let mut occs = Vec::with_capacity(text.len() + 2);
        occs.push(Occurrence {
            sym: MARKER,
            dep: Depfactor::basic(side, 0),
        });
        for c in text.chars() {
            if c.is_whitespace() {
                continue;
            }
            let sym = table.intern_char(c)?;
            let pos = occs.len() as u32;
            occs.push(Occurrence {
                sym,
                dep: Depfactor::basic(side, pos),
            });
        }
        let pos = occs.len() as u32;
        occs.push(Occurrence {
            sym: MARKER,
            dep: Depfactor::basic(side, pos),
        });
        if occs.len() == 2 {
            return Err(SolverError::Parse("empty side".into()));
        }
        Ok(occs)
    };
    let lhs = parse_side(lhs_text, Side::Lhs)?;
    let rhs = parse_side(rhs_text, Side::Rhs)?;
    let mut eq = Equation {
        lhs,
        rhs,
        n_x: BTreeMap::new(),
    };
    eq.n_x = eq.recount_variables(table);
    Ok(eq)
}

/// Reads an equation from file contents: `#` comments and blank lines are
/// ignored, the first remaining line is the equation.
pub fn parse_equation_file(contents: &str, table: &mut SymbolTable) -> Result<Equation> {
    for line in contents.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        return parse_equation(line, table);
    }
    Err(SolverError::Parse("no equation found".into()))
}

/// Variable images; a substitution maps each variable to a letter string.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    images: BTreeMap<SymbolId, Vec<SymbolId>>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, var: SymbolId, image: Vec<SymbolId>) {
        self.images.insert(var, image);
    }

    pub fn remove(&mut self, var: SymbolId) -> Option<Vec<SymbolId>> {
        self.images.remove(&var)
    }

    pub fn get(&self, var: SymbolId) -> Option<&[SymbolId]> {
        self.images.get(&var).map(|v| v.as_slice())
    }

    pub fn get_mut(&mut self, var: SymbolId) -> Option<&mut Vec<SymbolId>> {
        self.images.get_mut(&var)
    }

    pub fn vars(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.images.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, &[SymbolId])> + '_ {
        self.images.iter().map(|(&v, im)| (v, im.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Witness text: one `X = image` line per variable, `<eps>` for empty.
    pub fn to_witness_text(&self, table: &SymbolTable) -> String {
        let mut out = String::new();
        for (&var, image) in &self.images {
            out.push_str(table.display(var));
            out.push_str(" = ");
            if image.is_empty() {
                out.push_str("<eps>");
            } else {
                for &s in image {
                    out.push_str(table.display(s));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_witness_text(contents: &str, table: &mut SymbolTable) -> Result<Substitution> {
        let mut sub = Substitution::new();
        for line in contents.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(2, '=');
            let var_text = parts.next().unwrap_or("").trim();
            let image_text = parts
                .next()
                .ok_or_else(|| SolverError::Parse(format!("bad witness line {line:?}")))?
                .trim();
            let mut var_chars = var_text.chars();
            let (Some(c), None) = (var_chars.next(), var_chars.next()) else {
                return Err(SolverError::Parse(format!("bad variable {var_text:?}")));
            };
            let var = table.intern_char(c)?;
            let image = if image_text == "<eps>" {
                Vec::new()
            } else {
                let mut image = Vec::with_capacity(image_text.len());
                for c in image_text.chars() {
                    let sym = table.intern_char(c)?;
                    image.push(sym);
                }
                image
            };
            sub.set(var, image);
        }
        Ok(sub)
    }
}

/// Expands one side under a substitution, markers stripped.
pub fn materialize_side(
    occs: &[Occurrence],
    sub: &Substitution,
    table: &SymbolTable,
) -> Result<Vec<SymbolId>> {
    let mut out = Vec::new();
    for occ in occs {
        if table.is_marker(occ.sym) {
            continue;
        }
        if table.is_variable(occ.sym) {
            let image = sub
                .get(occ.sym)
                .ok_or_else(|| SolverError::MissingVariable(table.display(occ.sym).to_string()))?;
            out.extend_from_slice(image);
        } else {
            out.push(occ.sym);
        }
    }
    Ok(out)
}

/// `(sigma(U), sigma(V))` as display strings, markers stripped.
pub fn apply_substitution(
    eq: &Equation,
    sub: &Substitution,
    table: &SymbolTable,
) -> Result<(String, String)> {
    let u = materialize_side(&eq.lhs, sub, table)?;
    let v = materialize_side(&eq.rhs, sub, table)?;
    Ok((table.render(&u), table.render(&v)))
}

/// True iff the substitution makes both sides the same letter string.
pub fn check_solution(eq: &Equation, sub: &Substitution, table: &SymbolTable) -> Result<bool> {
    let u = materialize_side(&eq.lhs, sub, table)?;
    let v = materialize_side(&eq.rhs, sub, table)?;
    Ok(u == v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(text: &str) -> (SymbolTable, Equation) {
        let mut table = SymbolTable::new();
        let eq = parse_equation(text, &mut table).unwrap();
        (table, eq)
    }

    #[test]
    fn parse_inserts_markers_and_counts_occurrences() {
        let (table, eq) = setup("abX=Xab");
        assert_eq!(eq.lhs.len(), 5); // @ a b X @
        assert_eq!(eq.rhs.len(), 5);
        assert_eq!(eq.side_len(Side::Lhs), 3);
        let x = eq.variables()[0];
        assert_eq!(table.display(x), "X");
        assert_eq!(eq.occurrence_count(x), 2);
        assert_eq!(eq.alphabet(&table).len(), 2);
        assert!(eq.counts_consistent(&table));
    }

    #[test]
    fn parse_rejects_bad_input() {
        let mut table = SymbolTable::new();
        assert!(parse_equation("a=", &mut table).is_err());
        assert!(parse_equation("=b", &mut table).is_err());
        assert!(parse_equation("ab", &mut table).is_err());
        assert!(parse_equation("a=b=c", &mut table).is_err());
        assert!(parse_equation("a?=b", &mut table).is_err());
    }

    #[test]
    fn parse_two_variables() {
        let (table, eq) = setup("XY=ba");
        assert_eq!(eq.variables().len(), 2);
        for v in eq.variables() {
            assert_eq!(eq.occurrence_count(v), 1);
        }
        assert_eq!(eq.alphabet(&table).len(), 2);
    }

    #[test]
    fn parse_render_round_trip() {
        for text in ["abX = Xab", "XY = ba", "aaa = aaa", "XaYbZ = ZbYaX"] {
            let (table, eq) = setup(text);
            let rendered = eq.render(&table);
            let mut table2 = SymbolTable::new();
            let eq2 = parse_equation(&rendered, &mut table2).unwrap();
            assert_eq!(eq2.render(&table2), rendered);
        }
    }

    #[test]
    fn basic_depfactors_cover_each_position_once() {
        let (_, eq) = setup("aX=Xa");
        for (i, occ) in eq.lhs.iter().enumerate() {
            assert!(occ.dep.is_basic());
            assert_eq!(occ.dep.min_pos(), i as u32);
            assert_eq!(occ.dep.side, Side::Lhs);
        }
    }

    #[test]
    fn apply_and_check_solution() {
        let (mut table, eq) = setup("abX=Xab");
        let a = table.intern_char('a').unwrap();
        let b = table.intern_char('b').unwrap();
        let x = eq.variables()[0];

        let mut sub = Substitution::new();
        sub.set(x, vec![a, b]);
        assert_eq!(
            apply_substitution(&eq, &sub, &table).unwrap(),
            ("abab".to_string(), "abab".to_string())
        );
        assert!(check_solution(&eq, &sub, &table).unwrap());

        sub.set(x, vec![a]);
        assert_eq!(
            apply_substitution(&eq, &sub, &table).unwrap(),
            ("aba".to_string(), "aab".to_string())
        );
        assert!(!check_solution(&eq, &sub, &table).unwrap());
    }

    #[test]
    fn empty_image_and_commutation() {
        let (mut table, eq) = setup("aX=Xa");
        let a = table.intern_char('a').unwrap();
        let x = eq.variables()[0];
        let mut sub = Substitution::new();
        sub.set(x, vec![]);
        assert_eq!(
            apply_substitution(&eq, &sub, &table).unwrap(),
            ("a".to_string(), "a".to_string())
        );
        sub.set(x, vec![a, a, a]);
        assert!(check_solution(&eq, &sub, &table).unwrap());
    }

    #[test]
    fn missing_variable_is_reported() {
        let (table, eq) = setup("aX=Xa");
        let sub = Substitution::new();
        assert!(matches!(
            check_solution(&eq, &sub, &table),
            Err(SolverError::MissingVariable(_))
        ));
    }

    #[test]
    fn mixed_image_lengths() {
        let (mut table, eq) = setup("aX=Xb");
        let a = table.intern_char('a').unwrap();
        let b = table.intern_char('b').unwrap();
        let x = eq.variables()[0];
        let mut sub = Substitution::new();
        sub.set(x, vec![a, b]);
        assert_eq!(
            apply_substitution(&eq, &sub, &table).unwrap(),
            ("aab".to_string(), "abb".to_string())
        );
    }

    #[test]
    fn witness_text_round_trip() {
        let mut table = SymbolTable::new();
        let a = table.intern_char('a').unwrap();
        let b = table.intern_char('b').unwrap();
        let x = table.intern_char('X').unwrap();
        let y = table.intern_char('Y').unwrap();
        let mut sub = Substitution::new();
        sub.set(x, vec![a, b, b, a]);
        sub.set(y, vec![]);
        let text = sub.to_witness_text(&table);
        let parsed = Substitution::parse_witness_text(&text, &mut table).unwrap();
        assert_eq!(parsed, sub);
    }
}
