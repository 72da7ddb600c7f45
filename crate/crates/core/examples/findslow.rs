use std::time::Instant;
use wordeq::config::SolverConfig;
use wordeq::equation::parse_equation;
use wordeq::search::{solve_blind_with_cache, SearchCache};
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
    let sides = sides(3);
    let cfg = SolverConfig {
        max_phases: 8,
        max_block_exponent: 6,
        space_cap_bits: 1_000_000,
        node_budget: Some(20_000),
        ..SolverConfig::default()
    };
    let mut cache = SearchCache::new();
    let t0 = Instant::now();
    let mut over = 0;
    for u in &sides {
        for v in &sides {
            let mut table = SymbolTable::new();
            let eq = parse_equation(&format!("{u}={v}"), &mut table).unwrap();
            let blind = solve_blind_with_cache(&eq, &cfg, &mut table, &mut cache).unwrap();
            if blind.stats.nodes > 10_000 {
                over += 1;
                if over < 30 {
                    println!("{u}={v}: {} nodes sat={}", blind.stats.nodes, blind.verdict.is_sat());
                }
            }
        }
    }
    println!("{} instances over 100k nodes, {:?}, cache {}", over, t0.elapsed(), cache.len());
}
