//! Random satisfiable instances with a planted solution.
//!
//! Draw a random substitution and a random pattern for the left side, then
//! refactor the expanded string into the right side by repeatedly emitting
//! either the next literal letter or a variable whose image is a prefix of
//! what remains. Both sides expand to the same string by construction; the
//! planted solution is re-verified before the instance is returned.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::equation::{check_solution, parse_equation, Equation, Substitution};
use crate::error::{Result, SolverError};
use crate::symbol::{SymbolId, SymbolTable};

#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub n_vars: u32,
    pub n_letters: u32,
    pub side_len: u32,
    pub sol_len: u32,
    pub seed: u64,
}

const VAR_NAMES: &[u8] = b"XYZWVUTSRQPONMLKJIHGFEDCBA";
const MAX_ATTEMPTS: u32 = 100;

/// Generates a satisfiable equation together with a planted solution.
pub fn generate_instance(
    params: &GenParams,
    table: &mut SymbolTable,
) -> Result<(Equation, Substitution)> {
    if params.n_letters == 0 {
        return Err(SolverError::GenerationFailed(0));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(params.seed);
    let letter_names: Vec<char> = (0..params.n_letters.min(26))
        .map(|i| (b'a' + i as u8) as char)
        .collect();
    let var_names: Vec<char> = (0..params.n_vars.min(26) as usize)
        .map(|i| VAR_NAMES[i] as char)
        .collect();

    for attempt in 1..=MAX_ATTEMPTS {
        if let Some((eq_text, images)) = try_generate(params, &letter_names, &var_names, &mut rng)
        {
            let eq = parse_equation(&eq_text, table)?;
            let mut sub = Substitution::new();
            for (name, image) in &images {
                let var = table.intern_char(*name)?;
                let image: Result<Vec<SymbolId>> =
                    image.iter().map(|&c| table.intern_char(c)).collect();
                sub.set(var, image?);
            }
            // keep only variables the equation mentions
            let mut planted = Substitution::new();
            for var in eq.variables() {
                let image = sub.get(var).expect("image for used variable").to_vec();
                planted.set(var, image);
            }
            if check_solution(&eq, &planted, table)? {
                return Ok((eq, planted));
            }
            debug_assert!(false, "constructed instance failed verification");
        }
        let _ = attempt;
    }
    Err(SolverError::GenerationFailed(MAX_ATTEMPTS))
}

type CharImages = Vec<(char, Vec<char>)>;

fn try_generate(
    params: &GenParams,
    letters: &[char],
    vars: &[char],
    rng: &mut ChaCha12Rng,
) -> Option<(String, CharImages)> {
    let images: CharImages = vars
        .iter()
        .map(|&v| {
            let len = rng.random_range(0..=params.sol_len);
            let image: Vec<char> = (0..len)
                .map(|_| letters[rng.random_range(0..letters.len())])
                .collect();
            (v, image)
        })
        .collect();

    // left side: a random pattern of letters and variables
    let mut lhs: Vec<char> = Vec::with_capacity(params.side_len as usize);
    for _ in 0..params.side_len.max(1) {
        if !vars.is_empty() && rng.random_bool(0.4) {
            lhs.push(vars[rng.random_range(0..vars.len())]);
        } else {
            lhs.push(letters[rng.random_range(0..letters.len())]);
        }
    }

    // expand it
    let mut expanded: Vec<char> = Vec::new();
    for &c in &lhs {
        if c.is_ascii_uppercase() {
            let image = &images.iter().find(|(v, _)| *v == c).unwrap().1;
            expanded.extend_from_slice(image);
        } else {
            expanded.push(c);
        }
    }

    // right side: refactor the expansion
    let rhs: Vec<char> = if expanded.is_empty() {
        // every symbol of the left side is a variable with an empty image
        vec![*lhs.first()?]
    } else {
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < expanded.len() {
            let candidates: Vec<char> = images
                .iter()
                .filter(|(_, im)| {
                    !im.is_empty()
                        && pos + im.len() <= expanded.len()
                        && expanded[pos..pos + im.len()] == im[..]
                })
                .map(|(v, _)| *v)
                .collect();
            if !candidates.is_empty() && rng.random_bool(0.5) {
                let v = candidates[rng.random_range(0..candidates.len())];
                out.push(v);
                pos += images.iter().find(|(n, _)| *n == v).unwrap().1.len();
            } else {
                out.push(expanded[pos]);
                pos += 1;
            }
        }
        out
    };

    let text = format!(
        "{}={}",
        lhs.iter().collect::<String>(),
        rhs.iter().collect::<String>()
    );
    Some((text, images))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_solutions_verify() {
        for seed in 0..50 {
            let mut table = SymbolTable::new();
            let params = GenParams {
                n_vars: 2,
                n_letters: 3,
                side_len: 6,
                sol_len: 4,
                seed,
            };
            let (eq, sub) = generate_instance(&params, &mut table).unwrap();
            assert!(check_solution(&eq, &sub, &table).unwrap());
        }
    }

    #[test]
    fn zero_variables_yields_ground_identity() {
        let mut table = SymbolTable::new();
        let params = GenParams {
            n_vars: 0,
            n_letters: 2,
            side_len: 5,
            sol_len: 0,
            seed: 7,
        };
        let (eq, sub) = generate_instance(&params, &mut table).unwrap();
        assert!(eq.sides_equal());
        assert!(sub.is_empty());
        assert!(check_solution(&eq, &sub, &table).unwrap());
    }

    #[test]
    fn generation_is_deterministic() {
        let run = |seed| {
            let mut table = SymbolTable::new();
            let params = GenParams {
                n_vars: 3,
                n_letters: 2,
                side_len: 8,
                sol_len: 5,
                seed,
            };
            let (eq, _) = generate_instance(&params, &mut table).unwrap();
            eq.render(&table)
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
    }

    #[test]
    fn single_variable_instances() {
        for seed in 0..20 {
            let mut table = SymbolTable::new();
            let params = GenParams {
                n_vars: 1,
                n_letters: 2,
                side_len: 4,
                sol_len: 6,
                seed,
            };
            let (eq, sub) = generate_instance(&params, &mut table).unwrap();
            assert!(check_solution(&eq, &sub, &table).unwrap());
        }
    }
}
