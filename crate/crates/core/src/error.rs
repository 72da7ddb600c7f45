//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("substitution is undefined on variable {0}")]
    MissingVariable(String),
    #[error("enumeration budget exceeded after {0} candidates")]
    ResourceExceeded(u64),
    #[error("instance generation failed after {0} attempts")]
    GenerationFailed(u32),
    #[error("inconsistent pop guess: {0}")]
    InconsistentGuess(String),
    #[error("illegal pop: {0}")]
    IllegalPop(String),
    #[error("partition sides are not disjoint")]
    PartitionNotDisjoint,
    #[error("cannot build a code over an empty frequency map")]
    EmptyInput,
    #[error("no code assigned to symbol {0}")]
    MissingCode(String),
    #[error("incomparable depfactors: {0}")]
    IncomparableDepfactors(String),
    #[error("dangling derivation rule: {0}")]
    DanglingRule(String),
    #[error("shadow solution desynchronized: {0}")]
    Desync(String),
    #[error("encoded size {used} bits exceeds space cap of {cap} bits")]
    SpaceCapExceeded { used: u64, cap: u64 },
    #[error("phase cap of {0} exceeded")]
    PhaseCapExceeded(u32),
    #[error("no halving partition found: {0}")]
    NoHalvingPartition(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("not a solution: {0}")]
    NotASolution(String),
    #[error("witness does not verify: {0}")]
    BadWitness(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SolverError>;
