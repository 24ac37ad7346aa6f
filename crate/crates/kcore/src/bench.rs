//! Repeated-run measurement harness for the batch sketch.
//!
//! One row per (configuration, seed) run, holding the relative-error
//! percentiles against exact coreness and the space meters, followed by a
//! `seed=mean` row averaging the numeric columns. Runtime is wall clock
//! and therefore the one column that is not reproducible run to run.

use std::io::{self, Write};
use std::time::Instant;

use crate::graph::Graph;
use crate::peel::peel_coreness;
use crate::report::error_percentiles;
use crate::sketch::{run_sketch, Mode, SketchParams};
use crate::Result;

pub const CSV_HEADER: &str =
    "graph,mode,T,M,epsilon,seed,median,p60,p70,p80,p90,max_edges,sum_edges,runtime_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub graph: String,
    pub mode: String,
    pub t: String,
    pub m: String,
    pub epsilon: f64,
    pub seed: String,
    pub median: Option<f64>,
    pub p60: Option<f64>,
    pub p70: Option<f64>,
    pub p80: Option<f64>,
    pub p90: Option<f64>,
    pub max_edges: f64,
    pub sum_edges: f64,
    pub runtime_ms: f64,
}

fn mode_cells(params: &SketchParams) -> (String, String, String) {
    match params.mode {
        Mode::Theory => ("theory".into(), "-".into(), "-".into()),
        Mode::Practical { t, growth } => {
            ("practical".into(), t.to_string(), growth.to_string())
        }
    }
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Runs the batch sketch `runs` times with consecutive seeds starting at
/// `params.seed`, comparing against exact coreness restricted to vertices
/// of coreness at least `min_core`. Returns one row per run plus the mean
/// row.
pub fn run_bench(
    g: &Graph,
    graph_label: &str,
    params: &SketchParams,
    runs: usize,
    min_core: usize,
) -> Result<Vec<BenchRow>> {
    let exact = peel_coreness(g);
    let (mode, t, m) = mode_cells(params);
    // Commas would break the hand-written CSV; labels are ours to pick.
    let graph = graph_label.replace(',', "_");
    let mut rows = Vec::with_capacity(runs + 1);
    for k in 0..runs as u64 {
        let run_params = SketchParams { seed: params.seed + k, ..*params };
        let start = Instant::now();
        let (labels, stats) = run_sketch(g, &run_params)?;
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let errors = error_percentiles(&exact, &labels, min_core)?;
        rows.push(BenchRow {
            graph: graph.clone(),
            mode: mode.clone(),
            t: t.clone(),
            m: m.clone(),
            epsilon: params.epsilon,
            seed: run_params.seed.to_string(),
            median: errors.median,
            p60: errors.p60,
            p70: errors.p70,
            p80: errors.p80,
            p90: errors.p90,
            max_edges: stats.max_level_edges as f64,
            sum_edges: stats.sum_level_edges as f64,
            runtime_ms,
        });
    }
    if !rows.is_empty() {
        rows.push(mean_row(&rows));
    }
    Ok(rows)
}

fn mean_opt(rows: &[BenchRow], field: impl Fn(&BenchRow) -> Option<f64>) -> Option<f64> {
    let values: Vec<f64> = rows.iter().filter_map(&field).collect();
    if values.len() == rows.len() {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    } else {
        None
    }
}

fn mean_row(rows: &[BenchRow]) -> BenchRow {
    let n = rows.len() as f64;
    let first = &rows[0];
    BenchRow {
        graph: first.graph.clone(),
        mode: first.mode.clone(),
        t: first.t.clone(),
        m: first.m.clone(),
        epsilon: first.epsilon,
        seed: "mean".into(),
        median: mean_opt(rows, |r| r.median),
        p60: mean_opt(rows, |r| r.p60),
        p70: mean_opt(rows, |r| r.p70),
        p80: mean_opt(rows, |r| r.p80),
        p90: mean_opt(rows, |r| r.p90),
        max_edges: rows.iter().map(|r| r.max_edges).sum::<f64>() / n,
        sum_edges: rows.iter().map(|r| r.sum_edges).sum::<f64>() / n,
        runtime_ms: rows.iter().map(|r| r.runtime_ms).sum::<f64>() / n,
    }
}

/// Writes rows under the fixed header. None percentiles become empty cells.
pub fn write_csv<W: Write>(mut out: W, rows: &[BenchRow]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.graph,
            r.mode,
            r.t,
            r.m,
            r.epsilon,
            r.seed,
            opt_cell(r.median),
            opt_cell(r.p60),
            opt_cell(r.p70),
            opt_cell(r.p80),
            opt_cell(r.p90),
            r.max_edges,
            r.sum_edges,
            r.runtime_ms
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn rows_cover_runs_plus_mean() {
        let g = gen::gnp(150, 0.1, 3).unwrap();
        let params = SketchParams::practical(0.8, 3, 2.0, 11);
        let rows = run_bench(&g, "gnp150", &params, 3, 2).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[3].seed, "mean");
        for (k, row) in rows[..3].iter().enumerate() {
            assert_eq!(row.seed, (11 + k as u64).to_string());
            assert_eq!(row.graph, "gnp150");
            assert_eq!(row.mode, "practical");
            assert_eq!(row.t, "3");
            assert_eq!(row.m, "2");
            assert!(row.median.unwrap() >= 0.0);
            assert!(row.max_edges <= row.sum_edges);
            assert!(row.runtime_ms >= 0.0);
        }
        // The mean row really is the arithmetic mean of its column.
        let med = rows[..3].iter().map(|r| r.median.unwrap()).sum::<f64>() / 3.0;
        assert!((rows[3].median.unwrap() - med).abs() < 1e-12);
        let sum = rows[..3].iter().map(|r| r.sum_edges).sum::<f64>() / 3.0;
        assert!((rows[3].sum_edges - sum).abs() < 1e-9);
    }

    #[test]
    fn theory_rows_leave_knobs_blank() {
        let g = gen::gnp(60, 0.2, 5).unwrap();
        let params = SketchParams::theory(0.5, 2);
        let rows = run_bench(&g, "tiny", &params, 1, 1).unwrap();
        assert_eq!(rows[0].mode, "theory");
        assert_eq!(rows[0].t, "-");
        assert_eq!(rows[0].m, "-");
    }

    #[test]
    fn csv_round_trips_through_a_real_parser() {
        let g = gen::gnp(100, 0.15, 8).unwrap();
        let params = SketchParams::practical(1.0, 2, 2.0, 4);
        let rows = run_bench(&g, "roundtrip", &params, 2, 1).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> =
            reader.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(header.join(","), CSV_HEADER);
        let records: Vec<csv::StringRecord> =
            reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(records.len(), 3);
        for rec in &records {
            assert_eq!(rec.len(), 14);
        }
        assert_eq!(&records[2][5], "mean");
        let med: f64 = records[2][6].parse().unwrap();
        assert_eq!(med, rows[2].median.unwrap());
    }

    #[test]
    fn empty_restriction_leaves_cells_blank() {
        // A forest has coreness 1 everywhere; a floor of 2 excludes all.
        let g = gen::gnp(40, 0.02, 6).unwrap();
        let exact = crate::peel::peel_coreness(&g);
        assert!(exact.iter().all(|&c| c <= 1), "want an acyclic sample");
        let params = SketchParams::theory(0.5, 3);
        let rows = run_bench(&g, "forest", &params, 2, 2).unwrap();
        assert!(rows.iter().all(|r| r.median.is_none()));
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().contains(",,,,,"));
    }
}
