//! Word-equation satisfiability via recompression.
//!
//! The solver repeatedly compresses the equation: every maximal letter
//! block collapses to one fresh letter, then letter pairs are compressed
//! under partitions of the phase-start alphabet until every ordered pair
//! has been covered. Nondeterministic choices (popped letters, block
//! exponents, emptiness) are either derived from a known solution (guided
//! mode, used for space profiling) or searched over with backtracking
//! (blind mode). The bit-level bookkeeping — Huffman coding, dependency
//! factors, the potentials driving the partition strategy — is measured at
//! every rewrite step.

pub mod config;
pub mod depfactor;
pub mod depstate;
pub mod derivation;
pub mod encoding;
pub mod equation;
pub mod error;
pub mod generate;
pub mod guided;
pub mod metrics;
pub mod oracle;
pub mod recompress;
pub mod search;
pub mod strategy;
pub mod symbol;

pub use config::{NewLetterMode, PartitionMode, SolverConfig};
pub use depfactor::{Depfactor, Side};
pub use equation::{
    apply_substitution, check_solution, parse_equation, parse_equation_file, Equation, Occurrence,
    Substitution,
};
pub use error::{Result, SolverError};
pub use symbol::{SymbolId, SymbolTable};
