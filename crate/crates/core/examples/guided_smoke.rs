use std::time::Instant;
use wordeq::config::SolverConfig;
use wordeq::equation::parse_equation;
use wordeq::oracle::{brute_force_solve, OracleVerdict};
use wordeq::search::{solve_blind_with_cache, SearchCache, Verdict};
use wordeq::symbol::SymbolTable;

fn sides(max_len: usize) -> Vec<String> {
    let alphabet = ["a", "b", "X", "Y"];
    let mut out: Vec<String> = vec![String::new()];
    let mut all = Vec::new();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &out {
            for a in alphabet {
                let mut t = s.clone();
                t.push_str(a);
                next.push(t);
            }
        }
        all.extend(next.iter().cloned());
        out = next;
    }
    all
}

fn main() {
    let max_side: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    let sides = sides(max_side);
    let cfg = SolverConfig {
        max_phases: 8,
        max_block_exponent: 6,
        space_cap_bits: 1_000_000,
        ..SolverConfig::default()
    };
    let t0 = Instant::now();
    let mut n = 0u64;
    let mut sat = 0u64;
    let mut mismatches = 0u64;
    let mut unknowns = 0u64;
    let mut cache = SearchCache::new();
    let mut slowest = (0u128, String::new());
    for u in &sides {
        for v in &sides {
            n += 1;
            let mut table = SymbolTable::new();
            let eq = parse_equation(&format!("{u}={v}"), &mut table).unwrap();
            let t1 = Instant::now();
            let blind = solve_blind_with_cache(&eq, &cfg, &mut table, &mut cache).unwrap();
            let oracle = brute_force_solve(&eq, 8, 50_000_000, &table).unwrap();
            let dt = t1.elapsed().as_micros();
            if dt > slowest.0 { slowest = (dt, format!("{u}={v}")); }
            let b_sat = blind.verdict.is_sat();
            let o_sat = matches!(oracle, OracleVerdict::Sat(_));
            if b_sat { sat += 1; }
            if matches!(blind.verdict, Verdict::Unknown { .. }) { unknowns += 1; }
            if b_sat != o_sat {
                mismatches += 1;
                if mismatches < 20 {
                    println!("MISMATCH {u}={v}: blind={b_sat} oracle={o_sat}");
                }
            }
        }
        if t0.elapsed().as_secs() > 100 { println!("TIMEBOX after {n}"); break; }
    }
    println!("{n} instances, {sat} sat, {mismatches} mismatches, {unknowns} unknown, {:?} total", t0.elapsed());
    println!("slowest: {}us on {}", slowest.0, slowest.1);
    println!("cache entries: {}", cache.len());
}
