//! Error summaries and plain-text output for estimate runs.

use std::io::{self, Write};

use crate::sketch::SpaceStats;
use crate::{Error, Result};

/// Relative-error percentiles of an estimate vector against the exact
/// coreness, restricted to vertices at or above a coreness floor. The
/// percentile fields are `None` when no vertex passes the floor.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub count: usize,
    pub median: Option<f64>,
    pub p60: Option<f64>,
    pub p70: Option<f64>,
    pub p80: Option<f64>,
    pub p90: Option<f64>,
}

impl ErrorReport {
    pub fn percentile_rows(&self) -> [(&'static str, Option<f64>); 5] {
        [
            ("median", self.median),
            ("p60", self.p60),
            ("p70", self.p70),
            ("p80", self.p80),
            ("p90", self.p90),
        ]
    }
}

/// Nearest-rank percentile: the smallest element with at least a `q`
/// fraction of the sample at or below it.
fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Per-vertex relative errors `|approx - exact| / exact` over vertices
/// with exact coreness at least `min_core`, summarized at fixed
/// percentiles. `min_core` must be positive: vertices of coreness zero
/// have no meaningful relative error.
pub fn error_percentiles(
    exact: &[usize],
    approx: &[f64],
    min_core: usize,
) -> Result<ErrorReport> {
    if exact.len() != approx.len() {
        return Err(Error::InvalidArgument(format!(
            "exact and approximate labelings disagree on size: {} vs {}",
            exact.len(),
            approx.len()
        )));
    }
    if min_core == 0 {
        return Err(Error::InvalidArgument(
            "coreness floor must be at least 1".into(),
        ));
    }
    let mut errors: Vec<f64> = exact
        .iter()
        .zip(approx)
        .filter(|(&c, _)| c >= min_core)
        .map(|(&c, &a)| (a - c as f64).abs() / c as f64)
        .collect();
    errors.sort_by(|a, b| a.total_cmp(b));
    if errors.is_empty() {
        return Ok(ErrorReport {
            count: 0,
            median: None,
            p60: None,
            p70: None,
            p80: None,
            p90: None,
        });
    }
    Ok(ErrorReport {
        count: errors.len(),
        median: Some(nearest_rank(&errors, 0.5)),
        p60: Some(nearest_rank(&errors, 0.6)),
        p70: Some(nearest_rank(&errors, 0.7)),
        p80: Some(nearest_rank(&errors, 0.8)),
        p90: Some(nearest_rank(&errors, 0.9)),
    })
}

/// Writes one `vertex<TAB>label` line per vertex, ids ascending.
pub fn emit_labels<W: Write>(mut out: W, labels: &[f64]) -> io::Result<()> {
    for (v, label) in labels.iter().enumerate() {
        writeln!(out, "{v}\t{label}")?;
    }
    Ok(())
}

/// Integer variant of [`emit_labels`] for exact coreness output.
pub fn emit_exact_labels<W: Write>(mut out: W, labels: &[usize]) -> io::Result<()> {
    for (v, label) in labels.iter().enumerate() {
        writeln!(out, "{v}\t{label}")?;
    }
    Ok(())
}

/// Writes the space profile as `key<TAB>value` lines, then any extra rows.
pub fn emit_stats<W: Write>(
    mut out: W,
    stats: &SpaceStats,
    extras: &[(&str, String)],
) -> io::Result<()> {
    writeln!(out, "levels\t{}", stats.levels())?;
    let per_level = stats
        .per_level_edges
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",");
    writeln!(out, "per_level_edges\t{per_level}")?;
    writeln!(out, "max_level_edges\t{}", stats.max_level_edges)?;
    writeln!(out, "sum_level_edges\t{}", stats.sum_level_edges)?;
    writeln!(out, "peak_edges\t{}", stats.peak_edges)?;
    writeln!(out, "recovery_entries\t{}", stats.recovery_entries)?;
    for (key, value) in extras {
        writeln!(out, "{key}\t{value}")?;
    }
    Ok(())
}
