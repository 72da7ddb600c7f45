//! Command-line interface.
//!
//! Exit codes: 0 SAT, 1 UNSAT within bounds, 2 unknown / budget exhausted,
//! 3 parse or witness error, 4 invariant violation, 5 generation failure,
//! 6 compression-bound violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wordeq::config::{PartitionMode, SolverConfig};
use wordeq::derivation::DerivationLog;
use wordeq::equation::{check_solution, parse_equation_file, Equation, Substitution};
use wordeq::error::SolverError;
use wordeq::generate::{generate_instance, GenParams};
use wordeq::guided::solve_guided;
use wordeq::metrics::{export_csv, export_json};
use wordeq::oracle::{brute_force_solve, OracleVerdict};
use wordeq::recompress::compress_phase_string;
use wordeq::search::{solve_blind, Verdict};
use wordeq::symbol::{SymbolId, SymbolTable};

#[derive(Parser)]
#[command(name = "wordeq", version, about = "Word-equation satisfiability via recompression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability by backtracking search within the caps.
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = 64)]
        max_phases: u32,
        #[arg(long, default_value_t = 8)]
        max_exponent: u64,
        #[arg(long, default_value_t = 1_000_000)]
        space_cap_bits: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        node_budget: Option<u64>,
        /// Write the witness here on SAT.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Decide satisfiability by brute-force image enumeration.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: u32,
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
    },
    /// Replay a known solution and export the space measurements.
    Profile {
        file: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, value_enum, default_value_t = PartitionModeArg::Strategy)]
        partition_mode: PartitionModeArg,
        /// Metrics output path; `.json` selects JSON, anything else CSV.
        #[arg(long)]
        metrics: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        max_phases: u32,
        #[arg(long, default_value_t = 10_000_000)]
        space_cap_bits: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate satisfiable instances with planted witnesses.
    Gen {
        #[arg(long, default_value_t = 2)]
        vars: u32,
        #[arg(long, default_value_t = 3)]
        letters: u32,
        #[arg(long, default_value_t = 8)]
        side_len: u32,
        #[arg(long, default_value_t = 6)]
        sol_len: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one compression phase on a plain letter string.
    Compress { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionModeArg {
    Strategy,
    Canonical,
}

impl From<PartitionModeArg> for PartitionMode {
    fn from(v: PartitionModeArg) -> Self {
        match v {
            PartitionModeArg::Strategy => PartitionMode::Strategy,
            PartitionModeArg::Canonical => PartitionMode::Canonical,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for_error(&e))
        }
    }
}

fn exit_for_error(e: &SolverError) -> u8 {
    match e {
        SolverError::Parse(_)
        | SolverError::MissingVariable(_)
        | SolverError::BadWitness(_)
        | SolverError::NotASolution(_)
        | SolverError::Io(_) => 3,
        SolverError::ResourceExceeded(_) | SolverError::PhaseCapExceeded(_) => 2,
        SolverError::GenerationFailed(_) => 5,
        _ => 4,
    }
}

fn load_equation(path: &Path, table: &mut SymbolTable) -> Result<Equation, SolverError> {
    let contents = std::fs::read_to_string(path)?;
    parse_equation_file(&contents, table)
}

fn run(cli: Cli) -> Result<ExitCode, SolverError> {
    match cli.command {
        Command::Solve {
            file,
            max_phases,
            max_exponent,
            space_cap_bits,
            seed,
            node_budget,
            witness,
        } => {
            let mut table = SymbolTable::new();
            let eq = load_equation(&file, &mut table)?;
            let cfg = SolverConfig {
                max_phases,
                max_block_exponent: max_exponent,
                space_cap_bits,
                rng_seed: seed,
                node_budget,
                ..SolverConfig::default()
            };
            let out = solve_blind(&eq, &cfg, &mut table)?;
            match out.verdict {
                Verdict::Sat(sub) => {
                    println!("SAT nodes={}", out.stats.nodes);
                    print!("{}", sub.to_witness_text(&table));
                    if let Some(path) = witness {
                        std::fs::write(path, sub.to_witness_text(&table))?;
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Verdict::UnsatWithinBounds {
                    max_phases,
                    max_block_exponent,
                } => {
                    println!(
                        "UNSAT within-bounds phases={max_phases} exponent={max_block_exponent} nodes={}",
                        out.stats.nodes
                    );
                    Ok(ExitCode::from(1))
                }
                Verdict::Unknown { nodes } => {
                    println!("UNKNOWN nodes={nodes}");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Oracle { file, max_len, budget } => {
            let mut table = SymbolTable::new();
            let eq = load_equation(&file, &mut table)?;
            match brute_force_solve(&eq, max_len, budget, &table) {
                Ok(OracleVerdict::Sat(sub)) => {
                    println!("SAT max-len={max_len}");
                    print!("{}", sub.to_witness_text(&table));
                    Ok(ExitCode::SUCCESS)
                }
                Ok(OracleVerdict::UnsatWithinBound) => {
                    println!("UNSAT within-bounds max-len={max_len}");
                    Ok(ExitCode::from(1))
                }
                Err(SolverError::ResourceExceeded(b)) => {
                    println!("UNKNOWN budget={b}");
                    Ok(ExitCode::from(2))
                }
                Err(e) => Err(e),
            }
        }
        Command::Profile {
            file,
            witness,
            partition_mode,
            metrics,
            max_phases,
            space_cap_bits,
            seed,
        } => {
            let mut table = SymbolTable::new();
            let eq = load_equation(&file, &mut table)?;
            let witness_text = std::fs::read_to_string(&witness)?;
            let sub = Substitution::parse_witness_text(&witness_text, &mut table)?;
            if !check_solution(&eq, &sub, &table)? {
                return Err(SolverError::BadWitness(
                    "witness does not solve the equation".into(),
                ));
            }
            let cfg = SolverConfig {
                max_phases,
                space_cap_bits,
                rng_seed: seed,
                partition_mode: partition_mode.into(),
                ..SolverConfig::default()
            };
            let out = solve_guided(&eq, &sub, &cfg, &mut table)?;
            println!(
                "SAT phases={} max-ratio={:.6} max-settled-ratio={:.6}",
                out.phases,
                out.metrics.max_potential_ratio(),
                out.metrics.max_settled_potential_ratio()
            );
            if let Some(path) = metrics {
                let text = if path.extension().map(|e| e == "json").unwrap_or(false) {
                    export_json(&out.metrics)
                } else {
                    export_csv(&out.metrics)
                };
                std::fs::write(path, text)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen {
            vars,
            letters,
            side_len,
            sol_len,
            seed,
            count,
            out,
        } => {
            std::fs::create_dir_all(&out)?;
            for i in 0..count {
                let mut table = SymbolTable::new();
                let params = GenParams {
                    n_vars: vars,
                    n_letters: letters,
                    side_len,
                    sol_len,
                    seed: seed.wrapping_add(i as u64),
                };
                let (eq, sub) = generate_instance(&params, &mut table)?;
                let stem = format!("inst_{:04}", i);
                std::fs::write(out.join(format!("{stem}.eq")), format!("{}\n", eq.render(&table)))?;
                std::fs::write(out.join(format!("{stem}.wit")), sub.to_witness_text(&table))?;
            }
            println!("generated {count} instance(s) in {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Compress { file } => {
            let contents = std::fs::read_to_string(&file)?;
            let line = contents
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty() && !l.starts_with('#'))
                .ok_or_else(|| SolverError::Parse("no string found".into()))?;
            let mut table = SymbolTable::new();
            let mut w: Vec<SymbolId> = Vec::with_capacity(line.len());
            for c in line.chars() {
                let sym = table.intern_char(c)?;
                if !table.is_letter(sym) {
                    return Err(SolverError::Parse(format!("not a letter: {c:?}")));
                }
                w.push(sym);
            }
            let mut log = DerivationLog::new();
            let out = compress_phase_string(&w, 1, &mut table, &mut log)?;
            let before = w.len();
            let after = out.len();
            println!(
                "|w|={before} |w'|={after} ratio={:.6}",
                after as f64 / before as f64
            );
            print!("{}", log.render(&table));
            if 3 * after > 2 * before + 1 {
                eprintln!("error: compression bound violated");
                return Ok(ExitCode::from(6));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
