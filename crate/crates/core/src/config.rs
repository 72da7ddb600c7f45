//! Solver configuration.

/// How partitions are chosen during guided runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionMode {
    /// Fixed bit-split schedule over the phase-start alphabet.
    Canonical,
    /// Potential-halving strategy with simulation-verified choices.
    Strategy,
}

/// What counts as a "new" letter for the blocking classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewLetterMode {
    /// Any letter outside the phase-start alphabet (default).
    OutsideGamma,
    /// Only letters created by pair compression in the current phase.
    PairFreshOnly,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Cap on the number of phases before a run is cut off.
    pub max_phases: u32,
    /// Cap on the block exponents the blind search guesses.
    pub max_block_exponent: u64,
    /// Cap on image lengths in the brute-force oracle.
    pub max_oracle_len: u32,
    /// Branches whose encoded size exceeds this many bits are rejected.
    pub space_cap_bits: u64,
    /// Seed for randomized partition sampling and instance generation.
    pub rng_seed: u64,
    pub partition_mode: PartitionMode,
    pub new_letter_mode: NewLetterMode,
    /// Node budget for the blind search; `None` means unbounded.
    pub node_budget: Option<u64>,
    /// Candidate budget for the brute-force oracle.
    pub oracle_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_phases: 64,
            max_block_exponent: 8,
            max_oracle_len: 8,
            space_cap_bits: 1_000_000,
            rng_seed: 0,
            partition_mode: PartitionMode::Strategy,
            new_letter_mode: NewLetterMode::OutsideGamma,
            node_budget: None,
            oracle_budget: 50_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> crate::error::Result<()> {
        if self.max_phases == 0 || self.max_block_exponent == 0 || self.space_cap_bits == 0 {
            return Err(crate::error::SolverError::Invariant(
                "caps must be at least 1".into(),
            ));
        }
        Ok(())
    }
}
