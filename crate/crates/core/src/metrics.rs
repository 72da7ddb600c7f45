//! Per-step and per-phase measurements of a run, with JSON and CSV export.
//!
//! Every record is recomputed from the authoritative state when it is
//! taken; nothing here caches incrementally. Floats are rounded to six
//! decimal digits on export so that export -> parse -> export is
//! byte-identical.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};

/// `h(x) = x * log2(x + 1)`, the index-cost shape used by the potentials.
pub fn h(x: u64) -> f64 {
    x as f64 * ((x + 1) as f64).log2()
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub phase: u32,
    pub step: String,
    pub partition: Option<u32>,
    pub len_u: u64,
    pub len_v: u64,
    pub letter_bits: u64,
    pub variable_bits: u64,
    pub total_bits: u64,
    pub dep_bits: u64,
    pub h_d: u64,
    pub h_n: f64,
    pub s_a: u64,
    pub s_b: u64,
    pub s_c: u64,
    pub s_d: u64,
    pub uncovered: u64,
    /// True when the record was taken right after a compression completed;
    /// pop transients in between are recorded but not size-checked.
    pub settled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEnd {
    pub phase: u32,
    pub h_d_start: u64,
    pub h_n_start: f64,
    pub h_d_end: u64,
    pub h_n_end: f64,
    /// Sum over basic positions of `h` of the popped-unit counter.
    pub sum_h_p: f64,
    /// Sum over basic positions of `h` of the extension-unit counter.
    pub sum_h_e: f64,
    pub sum_k: u64,
    pub sum_p: u64,
    pub sum_e: u64,
    pub partitions: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseMetrics {
    pub phase: u32,
    pub steps: Vec<StepRecord>,
    pub end: Option<PhaseEnd>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub schema: u32,
    pub abs0: u64,
    pub abs0_no_markers: u64,
    pub phases: Vec<PhaseMetrics>,
}

impl RunMetrics {
    pub fn new(abs0: u64, abs0_no_markers: u64) -> Self {
        RunMetrics {
            schema: SCHEMA_VERSION,
            abs0,
            abs0_no_markers,
            phases: Vec::new(),
        }
    }

    pub fn all_steps(&self) -> impl Iterator<Item = &StepRecord> {
        self.phases.iter().flat_map(|p| p.steps.iter())
    }

    /// Largest `(h_d + h_n) / abs0` over all recorded steps.
    pub fn max_potential_ratio(&self) -> f64 {
        let abs = self.abs0.max(1) as f64;
        self.all_steps()
            .map(|s| (s.h_d as f64 + s.h_n) / abs)
            .fold(0.0, f64::max)
    }

    /// Same ratio over settled steps only, i.e. the states left behind by a
    /// completed compression rather than the transient with popped blocks
    /// spelled out.
    pub fn max_settled_potential_ratio(&self) -> f64 {
        let abs = self.abs0.max(1) as f64;
        self.all_steps()
            .filter(|s| s.settled)
            .map(|s| (s.h_d as f64 + s.h_n) / abs)
            .fold(0.0, f64::max)
    }

    fn rounded(&self) -> RunMetrics {
        let mut out = self.clone();
        for phase in &mut out.phases {
            for s in &mut phase.steps {
                s.h_n = round6(s.h_n);
            }
            if let Some(end) = &mut phase.end {
                end.h_n_start = round6(end.h_n_start);
                end.h_n_end = round6(end.h_n_end);
                end.sum_h_p = round6(end.sum_h_p);
                end.sum_h_e = round6(end.sum_h_e);
            }
        }
        out
    }
}

pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

pub fn export_json(metrics: &RunMetrics) -> String {
    let mut s = serde_json::to_string_pretty(&metrics.rounded()).expect("metrics serialize");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> Result<RunMetrics> {
    serde_json::from_str(text).map_err(|e| SolverError::Parse(format!("metrics json: {e}")))
}

const CSV_HEADER: &str = "kind,phase,step,partition,len_u,len_v,letter_bits,variable_bits,total_bits,dep_bits,h_d,h_n,s_a,s_b,s_c,s_d,uncovered,settled,h_d_start,h_n_start,h_d_end,h_n_end,sum_h_p,sum_h_e,sum_k,sum_p,sum_e,partitions";

pub fn export_csv(metrics: &RunMetrics) -> String {
    let m = metrics.rounded();
    let mut out = String::new();
    out.push_str(&format!(
        "# wordeq-metrics v{} abs0={} abs0_no_markers={}\n",
        m.schema, m.abs0, m.abs0_no_markers
    ));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for phase in &m.phases {
        for s in &phase.steps {
            let partition = s.partition.map(|p| p.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "step,{},{},{},{},{},{},{},{},{},{},{:.6},{},{},{},{},{},{},,,,,,,,,,\n",
                s.phase,
                s.step,
                partition,
                s.len_u,
                s.len_v,
                s.letter_bits,
                s.variable_bits,
                s.total_bits,
                s.dep_bits,
                s.h_d,
                s.h_n,
                s.s_a,
                s.s_b,
                s.s_c,
                s.s_d,
                s.uncovered,
                s.settled
            ));
        }
        if let Some(e) = &phase.end {
            out.push_str(&format!(
                "end,{},,,,,,,,,,,,,,,,,{},{:.6},{},{:.6},{:.6},{:.6},{},{},{},{}\n",
                e.phase,
                e.h_d_start,
                e.h_n_start,
                e.h_d_end,
                e.h_n_end,
                e.sum_h_p,
                e.sum_h_e,
                e.sum_k,
                e.sum_p,
                e.sum_e,
                e.partitions
            ));
        }
    }
    out
}

pub fn parse_csv(text: &str) -> Result<RunMetrics> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| SolverError::Parse("empty metrics csv".into()))?;
    let fields: Vec<&str> = header.trim_start_matches('#').split_whitespace().collect();
    let bad = || SolverError::Parse("bad metrics csv header".into());
    if fields.len() != 4 || fields[0] != "wordeq-metrics" {
        return Err(bad());
    }
    let schema: u32 = fields[1]
        .strip_prefix('v')
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad)?;
    let abs0: u64 = fields[2].strip_prefix("abs0=").and_then(|v| v.parse().ok()).ok_or_else(bad)?;
    let abs0_no_markers: u64 = fields[3]
        .strip_prefix("abs0_no_markers=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad)?;
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err(SolverError::Parse("bad metrics csv column header".into())),
    }

    let mut metrics = RunMetrics {
        schema,
        abs0,
        abs0_no_markers,
        phases: Vec::new(),
    };
    let parse_err = |line: &str| SolverError::Parse(format!("bad metrics csv row: {line}"));
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 28 {
            return Err(parse_err(line));
        }
        let phase: u32 = cols[1].parse().map_err(|_| parse_err(line))?;
        if metrics.phases.last().map(|p| p.phase) != Some(phase) {
            metrics.phases.push(PhaseMetrics {
                phase,
                steps: Vec::new(),
                end: None,
            });
        }
        let current = metrics.phases.last_mut().unwrap();
        match cols[0] {
            "step" => {
                let partition = if cols[3].is_empty() {
                    None
                } else {
                    Some(cols[3].parse().map_err(|_| parse_err(line))?)
                };
                current.steps.push(StepRecord {
                    phase,
                    step: cols[2].to_string(),
                    partition,
                    len_u: cols[4].parse().map_err(|_| parse_err(line))?,
                    len_v: cols[5].parse().map_err(|_| parse_err(line))?,
                    letter_bits: cols[6].parse().map_err(|_| parse_err(line))?,
                    variable_bits: cols[7].parse().map_err(|_| parse_err(line))?,
                    total_bits: cols[8].parse().map_err(|_| parse_err(line))?,
                    dep_bits: cols[9].parse().map_err(|_| parse_err(line))?,
                    h_d: cols[10].parse().map_err(|_| parse_err(line))?,
                    h_n: cols[11].parse().map_err(|_| parse_err(line))?,
                    s_a: cols[12].parse().map_err(|_| parse_err(line))?,
                    s_b: cols[13].parse().map_err(|_| parse_err(line))?,
                    s_c: cols[14].parse().map_err(|_| parse_err(line))?,
                    s_d: cols[15].parse().map_err(|_| parse_err(line))?,
                    uncovered: cols[16].parse().map_err(|_| parse_err(line))?,
                    settled: cols[17].parse().map_err(|_| parse_err(line))?,
                });
            }
            "end" => {
                current.end = Some(PhaseEnd {
                    phase,
                    h_d_start: cols[18].parse().map_err(|_| parse_err(line))?,
                    h_n_start: cols[19].parse().map_err(|_| parse_err(line))?,
                    h_d_end: cols[20].parse().map_err(|_| parse_err(line))?,
                    h_n_end: cols[21].parse().map_err(|_| parse_err(line))?,
                    sum_h_p: cols[22].parse().map_err(|_| parse_err(line))?,
                    sum_h_e: cols[23].parse().map_err(|_| parse_err(line))?,
                    sum_k: cols[24].parse().map_err(|_| parse_err(line))?,
                    sum_p: cols[25].parse().map_err(|_| parse_err(line))?,
                    sum_e: cols[26].parse().map_err(|_| parse_err(line))?,
                    partitions: cols[27].parse().map_err(|_| parse_err(line))?,
                });
            }
            _ => return Err(parse_err(line)),
        }
    }
    Ok(metrics)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_matches_hand_values() {
        assert!((h(3) - 6.0).abs() < 1e-12); // 3 * log2(4)
        assert_eq!(h(0), 0.0);
        assert!((h(1) - 1.0).abs() < 1e-12);
    }

    fn sample() -> RunMetrics {
        let mut m = RunMetrics::new(42, 38);
        m.phases.push(PhaseMetrics {
            phase: 1,
            steps: vec![StepRecord {
                phase: 1,
                step: "pop-blocks".into(),
                partition: None,
                len_u: 6,
                len_v: 6,
                letter_bits: 12,
                variable_bits: 2,
                total_bits: 14,
                dep_bits: 30,
                h_d: 42,
                h_n: 28.529325,
                s_a: 4,
                s_b: 8,
                s_c: 2,
                s_d: 6,
                uncovered: 2,
                settled: false,
            }],
            end: Some(PhaseEnd {
                phase: 1,
                h_d_start: 42,
                h_n_start: 28.0,
                h_d_end: 30,
                h_n_end: 20.1234564,
                sum_h_p: 6.0,
                sum_h_e: 4.0,
                sum_k: 14,
                sum_p: 3,
                sum_e: 2,
                partitions: 2,
            }),
        });
        m
    }

    #[test]
    fn empty_run_exports_header_only_csv() {
        let m = RunMetrics::new(0, 0);
        let csv = export_csv(&m);
        assert_eq!(csv.lines().count(), 2);
        let parsed = parse_csv(&csv).unwrap();
        assert_eq!(parsed, m);
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let csv = export_csv(&sample());
        let parsed = parse_csv(&csv).unwrap();
        assert_eq!(export_csv(&parsed), csv);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let json = export_json(&sample());
        assert!(json.contains("\"h_d\""));
        let parsed = parse_json(&json).unwrap();
        assert_eq!(export_json(&parsed), json);
    }
}
