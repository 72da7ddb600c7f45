//! Brute-force enumeration oracle.
//!
//! Enumerates substitutions over the equation's own letters in ascending
//! weight (total image length counted with occurrence multiplicity), so the
//! first hit is a length-minimal solution. Candidate images whose lengths
//! cannot make the two sides equally long are skipped wholesale; everything
//! else is checked letter by letter with early exit.

use crate::equation::{Equation, Substitution};
use crate::error::{Result, SolverError};
use crate::symbol::{SymbolId, SymbolTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Sat(Substitution),
    UnsatWithinBound,
}

impl OracleVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleVerdict::Sat(_))
    }
}

#[derive(Debug, Clone, Copy)]
enum Tok {
    Letter(SymbolId),
    Var(usize),
}

/// Checks all substitutions with images of length at most `max_len` per
/// variable, drawn from the equation's alphabet. Errors out once more than
/// `budget` candidate substitutions have been inspected.
pub fn brute_force_solve(
    eq: &Equation,
    max_len: u32,
    budget: u64,
    table: &SymbolTable,
) -> Result<OracleVerdict> {
    let vars = eq.variables();
    let letters: Vec<SymbolId> = eq.alphabet(table).into_iter().collect();

    let tokenize = |occs: &[crate::equation::Occurrence]| -> Vec<Tok> {
        occs[1..occs.len() - 1]
            .iter()
            .map(|o| {
                if table.is_variable(o.sym) {
                    Tok::Var(vars.iter().position(|&v| v == o.sym).unwrap())
                } else {
                    Tok::Letter(o.sym)
                }
            })
            .collect()
    };
    let pat_u = tokenize(&eq.lhs);
    let pat_v = tokenize(&eq.rhs);

    let mut letters_u = 0i64;
    let mut letters_v = 0i64;
    let mut mult_u = vec![0i64; vars.len()];
    let mut mult_v = vec![0i64; vars.len()];
    for t in &pat_u {
        match t {
            Tok::Letter(_) => letters_u += 1,
            Tok::Var(i) => mult_u[*i] += 1,
        }
    }
    for t in &pat_v {
        match t {
            Tok::Letter(_) => letters_v += 1,
            Tok::Var(i) => mult_v[*i] += 1,
        }
    }
    let mult_total: Vec<u64> = (0..vars.len())
        .map(|i| (mult_u[i] + mult_v[i]) as u64)
        .collect();

    let mut checked = 0u64;
    let mut lens = vec![0u32; vars.len()];
    let max_weight: u64 = mult_total.iter().map(|&m| m * max_len as u64).sum();

    for weight in 0..=max_weight {
        if let Some(sub) = enumerate_lengths(
            &mut lens,
            0,
            weight,
            max_len,
            &mult_total,
            &mult_u,
            &mult_v,
            letters_u,
            letters_v,
            &letters,
            &vars,
            &pat_u,
            &pat_v,
            budget,
            &mut checked,
        )? {
            return Ok(OracleVerdict::Sat(sub));
        }
    }
    Ok(OracleVerdict::UnsatWithinBound)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_lengths(
    lens: &mut [u32],
    i: usize,
    remaining_weight: u64,
    max_len: u32,
    mult_total: &[u64],
    mult_u: &[i64],
    mult_v: &[i64],
    letters_u: i64,
    letters_v: i64,
    letters: &[SymbolId],
    vars: &[SymbolId],
    pat_u: &[Tok],
    pat_v: &[Tok],
    budget: u64,
    checked: &mut u64,
) -> Result<Option<Substitution>> {
    if i == lens.len() {
        if remaining_weight != 0 {
            return Ok(None);
        }
        // sides must come out equally long
        let len_u = letters_u + (0..lens.len()).map(|k| mult_u[k] * lens[k] as i64).sum::<i64>();
        let len_v = letters_v + (0..lens.len()).map(|k| mult_v[k] * lens[k] as i64).sum::<i64>();
        if len_u != len_v {
            return Ok(None);
        }
        return enumerate_images(lens, letters, vars, pat_u, pat_v, budget, checked);
    }
    if mult_total[i] == 0 {
        // variable absent from the equation: keep its image empty
        lens[i] = 0;
        return enumerate_lengths(
            lens,
            i + 1,
            remaining_weight,
            max_len,
            mult_total,
            mult_u,
            mult_v,
            letters_u,
            letters_v,
            letters,
            vars,
            pat_u,
            pat_v,
            budget,
            checked,
        );
    }
    let cap = (remaining_weight / mult_total[i]).min(max_len as u64) as u32;
    for len in 0..=cap {
        lens[i] = len;
        let used = mult_total[i] * len as u64;
        if let Some(sub) = enumerate_lengths(
            lens,
            i + 1,
            remaining_weight - used,
            max_len,
            mult_total,
            mult_u,
            mult_v,
            letters_u,
            letters_v,
            letters,
            vars,
            pat_u,
            pat_v,
            budget,
            checked,
        )? {
            return Ok(Some(sub));
        }
    }
    Ok(None)
}

fn enumerate_images(
    lens: &[u32],
    letters: &[SymbolId],
    vars: &[SymbolId],
    pat_u: &[Tok],
    pat_v: &[Tok],
    budget: u64,
    checked: &mut u64,
) -> Result<Option<Substitution>> {
    let total_len: usize = lens.iter().map(|&l| l as usize).sum();
    if total_len > 0 && letters.is_empty() {
        return Ok(None);
    }
    // images as digit strings over the alphabet, advanced like an odometer
    // with the last variable fastest
    let mut digits: Vec<Vec<usize>> = lens.iter().map(|&l| vec![0; l as usize]).collect();
    loop {
        *checked += 1;
        if *checked > budget {
            return Err(SolverError::ResourceExceeded(budget));
        }
        let images: Vec<Vec<SymbolId>> = digits
            .iter()
            .map(|d| d.iter().map(|&i| letters[i]).collect())
            .collect();
        if sides_match(pat_u, pat_v, &images) {
            let mut sub = Substitution::new();
            for (k, &var) in vars.iter().enumerate() {
                sub.set(var, images[k].clone());
            }
            return Ok(Some(sub));
        }
        // increment
        let mut done = true;
        'outer: for var_digits in digits.iter_mut().rev() {
            for d in var_digits.iter_mut().rev() {
                if *d + 1 < letters.len() {
                    *d += 1;
                    done = false;
                    break 'outer;
                }
                *d = 0;
            }
        }
        if done {
            return Ok(None);
        }
    }
}

/// Letter-by-letter comparison of both expanded sides without building
/// them; bails out on the first mismatch.
fn sides_match(pat_u: &[Tok], pat_v: &[Tok], images: &[Vec<SymbolId>]) -> bool {
    let mut u = Cursor::new(pat_u, images);
    let mut v = Cursor::new(pat_v, images);
    loop {
        match (u.next(), v.next()) {
            (None, None) => return true,
            (Some(a), Some(b)) if a == b => {}
            _ => return false,
        }
    }
}

struct Cursor<'a> {
    pat: &'a [Tok],
    images: &'a [Vec<SymbolId>],
    tok: usize,
    off: usize,
}

impl<'a> Cursor<'a> {
    fn new(pat: &'a [Tok], images: &'a [Vec<SymbolId>]) -> Self {
        Cursor {
            pat,
            images,
            tok: 0,
            off: 0,
        }
    }
}

impl<'a> Iterator for Cursor<'a> {
    type Item = SymbolId;

    fn next(&mut self) -> Option<SymbolId> {
        loop {
            let t = self.pat.get(self.tok)?;
            match t {
                Tok::Letter(s) => {
                    self.tok += 1;
                    return Some(*s);
                }
                Tok::Var(i) => {
                    let image = &self.images[*i];
                    if self.off < image.len() {
                        let s = image[self.off];
                        self.off += 1;
                        return Some(s);
                    }
                    self.tok += 1;
                    self.off = 0;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::{check_solution, parse_equation};

    fn oracle(text: &str, max_len: u32) -> (OracleVerdict, SymbolTable, Equation) {
        let mut table = SymbolTable::new();
        let eq = parse_equation(text, &mut table).unwrap();
        let v = brute_force_solve(&eq, max_len, 10_000_000, &table).unwrap();
        (v, table, eq)
    }

    #[test]
    fn finds_empty_image_at_zero_bound() {
        let (v, _, _) = oracle("aX=Xa", 0);
        match v {
            OracleVerdict::Sat(sub) => {
                let x = sub.vars().next().unwrap();
                assert!(sub.get(x).unwrap().is_empty());
            }
            _ => panic!("expected SAT"),
        }
    }

    #[test]
    fn shifted_equation_is_unsat_within_bound() {
        // exhaustive check over all images up to length 3
        let (v, _, _) = oracle("aX=Xb", 3);
        assert_eq!(v, OracleVerdict::UnsatWithinBound);
        let (v, _, _) = oracle("Xb=aX", 2);
        assert_eq!(v, OracleVerdict::UnsatWithinBound);
    }

    #[test]
    fn found_solutions_verify_and_are_minimal() {
        let (v, table, eq) = oracle("abX=Xab", 4);
        match v {
            OracleVerdict::Sat(sub) => {
                assert!(check_solution(&eq, &sub, &table).unwrap());
                let x = sub.vars().next().unwrap();
                // shortest solutions are the empty image? ab X = X ab forces
                // X in (ab)^*; the minimal one is the empty string
                assert!(sub.get(x).unwrap().is_empty());
            }
            _ => panic!("expected SAT"),
        }
    }

    #[test]
    fn weight_order_returns_short_witnesses_first() {
        let (v, table, eq) = oracle("XX=aabaab", 4);
        match v {
            OracleVerdict::Sat(sub) => {
                assert!(check_solution(&eq, &sub, &table).unwrap());
                let x = sub.vars().next().unwrap();
                assert_eq!(table.render(sub.get(x).unwrap()), "aab");
            }
            _ => panic!("expected SAT"),
        }
    }

    #[test]
    fn budget_blowup_is_reported() {
        // unsat, so enumeration would visit all 2^l images per length
        let mut table = SymbolTable::new();
        let eq = parse_equation("aX=Xb", &mut table).unwrap();
        assert!(matches!(
            brute_force_solve(&eq, 6, 10, &table),
            Err(SolverError::ResourceExceeded(10))
        ));
    }

    #[test]
    fn ground_equations_need_no_enumeration() {
        let (v, _, _) = oracle("ab=ab", 5);
        assert!(v.is_sat());
        let (v, _, _) = oracle("ab=ba", 5);
        assert_eq!(v, OracleVerdict::UnsatWithinBound);
    }

    #[test]
    fn variable_only_equations() {
        let (v, _, _) = oracle("XY=YX", 2);
        assert!(v.is_sat());
    }

    #[test]
    fn oracle_sat_implies_check_solution() {
        for text in ["aX=Xa", "XY=YX", "XaY=aYX", "XX=YY", "aXb=aab"] {
            let (v, table, eq) = oracle(text, 3);
            if let OracleVerdict::Sat(sub) = v {
                assert!(check_solution(&eq, &sub, &table).unwrap(), "{text}");
            }
        }
    }
}
