//! Batch coreness estimation over nested sampled levels.
//!
//! The sketch runs the protected labeling on a ladder of sampled subgraphs
//! whose probabilities grow geometrically until they clamp at 1. A vertex
//! settles at the first level where its label reaches the lower threshold
//! (or at the saturated level, where everything settles), and its estimate
//! is the label rescaled by the level's sampling probability and shrunk by
//! `1 - epsilon`. Labels above the upper threshold are capped before
//! rescaling so an unlucky dense sample cannot overshoot.
//!
//! Edges whose endpoints have both settled at earlier levels stop counting
//! toward deeper levels; the per-level space profile reflects that.

use crate::graph::Graph;
use crate::peel::label_protected;
use crate::sampler::{EdgeHasher, LevelSchedule};
use crate::{Error, Result};

/// How the promotion thresholds and level growth are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Thresholds scale with `ln n / epsilon^2` and levels double.
    Theory,
    /// Integer promotion threshold `t` (upper cap `2 t`) and a configurable
    /// growth factor; the base probability still scales with `ln n`.
    Practical { t: usize, growth: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SketchParams {
    pub epsilon: f64,
    pub mode: Mode,
    pub seed: u64,
}

impl SketchParams {
    pub fn theory(epsilon: f64, seed: u64) -> Self {
        SketchParams { epsilon, mode: Mode::Theory, seed }
    }

    pub fn practical(epsilon: f64, t: usize, growth: f64, seed: u64) -> Self {
        SketchParams { epsilon, mode: Mode::Practical { t, growth }, seed }
    }
}

/// Derived promotion thresholds for one run: the base sampling probability,
/// the label value that triggers settling (`lower`), the cap applied before
/// rescaling (`upper`), and the accuracy parameter they were derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub base_prob: f64,
    pub lower: f64,
    pub upper: f64,
    pub epsilon: f64,
}

fn validate(n: usize, params: &SketchParams) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "sketching needs at least 2 vertices, got {n}"
        )));
    }
    let eps = params.epsilon;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1], got {eps}"
        )));
    }
    if let Mode::Practical { t, growth } = params.mode {
        if t == 0 {
            return Err(Error::InvalidArgument("threshold t must be at least 1".into()));
        }
        if growth <= 1.0 || !growth.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "growth factor must exceed 1, got {growth}"
            )));
        }
    }
    Ok((n as f64).ln())
}

impl Thresholds {
    /// Thresholds for the batch and streaming sketches. In theory mode the
    /// lower threshold is `192 ln n / eps^2`, the cap twice that, and the
    /// base probability `96 ln n / (eps^2 n)` clamped to 1.
    pub fn batch(n: usize, params: &SketchParams) -> Result<(Thresholds, LevelSchedule)> {
        Self::scaled(n, params, 96.0, 192.0, 384.0)
    }

    /// Thresholds for the deletion-capable sketch, which can afford a lower
    /// constant because its recovery stash catches demotions.
    pub fn turnstile(n: usize, params: &SketchParams) -> Result<(Thresholds, LevelSchedule)> {
        Self::scaled(n, params, 12.0, 24.0, 48.0)
    }

    fn scaled(
        n: usize,
        params: &SketchParams,
        c_prob: f64,
        c_lower: f64,
        c_upper: f64,
    ) -> Result<(Thresholds, LevelSchedule)> {
        let log_n = validate(n, params)?;
        let eps2 = params.epsilon * params.epsilon;
        let base_prob = (c_prob * log_n / (eps2 * n as f64)).min(1.0);
        let (lower, upper, growth) = match params.mode {
            Mode::Theory => (c_lower * log_n / eps2, c_upper * log_n / eps2, 2.0),
            Mode::Practical { t, growth } => (t as f64, 2.0 * t as f64, growth),
        };
        let schedule = LevelSchedule::new(base_prob, growth)?;
        Ok((
            Thresholds { base_prob, lower, upper, epsilon: params.epsilon },
            schedule,
        ))
    }
}

/// Turns a raw label obtained at sampling probability `prob` into a
/// coreness estimate: rescale by the probability, shrink by `1 - epsilon`,
/// capping the label at the upper threshold first.
pub fn assign_label(level_value: usize, prob: f64, thresholds: &Thresholds) -> f64 {
    let l = (level_value as f64).min(thresholds.upper);
    (1.0 - thresholds.epsilon) * l / prob
}

/// Memory profile of a sketch run: how many edges each executed level held,
/// plus the peak simultaneous total. `recovery_entries` counts stashed
/// deletion-recovery edges and stays 0 for batch and insertion-only runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceStats {
    pub per_level_edges: Vec<usize>,
    pub max_level_edges: usize,
    pub sum_level_edges: usize,
    pub peak_edges: usize,
    pub recovery_entries: usize,
}

impl SpaceStats {
    pub(crate) fn new(per_level_edges: Vec<usize>, peak_edges: usize, recovery_entries: usize) -> Self {
        let max_level_edges = per_level_edges.iter().copied().max().unwrap_or(0);
        let sum_level_edges = per_level_edges.iter().sum();
        SpaceStats {
            per_level_edges,
            max_level_edges,
            sum_level_edges,
            peak_edges,
            recovery_entries,
        }
    }

    /// Number of levels the run actually executed.
    pub fn levels(&self) -> usize {
        self.per_level_edges.len()
    }
}

/// Runs the batch sketch and returns one coreness estimate per vertex plus
/// the space profile. Deterministic in `(graph, params)`.
pub fn run_sketch(g: &Graph, params: &SketchParams) -> Result<(Vec<f64>, SpaceStats)> {
    let (thresholds, schedule) = Thresholds::batch(g.vertex_count(), params)?;
    Ok(run_leveled(g, params.seed, &thresholds, &schedule))
}

/// The level loop shared by the batch front end and the cluster simulator.
pub(crate) fn run_leveled(
    g: &Graph,
    seed: u64,
    thresholds: &Thresholds,
    schedule: &LevelSchedule,
) -> (Vec<f64>, SpaceStats) {
    run_leveled_with(g, seed, thresholds, schedule, |_, _, _| {})
}

/// Same run as [`run_leveled`], invoking `observe` once per executed level
/// with the level index, the edges held at that level, and the settled
/// mask as of level entry. The run itself is byte-identical regardless of
/// the observer.
pub(crate) fn run_leveled_with<F>(
    g: &Graph,
    seed: u64,
    thresholds: &Thresholds,
    schedule: &LevelSchedule,
    mut observe: F,
) -> (Vec<f64>, SpaceStats)
where
    F: FnMut(usize, &[(usize, usize)], &[bool]),
{
    let n = g.vertex_count();
    let hasher = EdgeHasher::new(seed);
    let mut settled = vec![false; n];
    let mut labels = vec![0.0f64; n];
    let mut per_level_edges = Vec::new();
    for j in 0..schedule.levels() {
        let p = schedule.prob(j);
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut held = Vec::new();
        for &(u, v) in g.edges() {
            if settled[u] && settled[v] {
                continue;
            }
            if hasher.rank(u, v) <= p {
                adj[u].push(v);
                adj[v].push(u);
                held.push((u, v));
            }
        }
        observe(j, &held, &settled);
        per_level_edges.push(held.len());
        let labeling = label_protected(n, |v| adj[v].iter().copied(), &settled);
        let saturated = p >= 1.0;
        let mut all_settled = true;
        for v in 0..n {
            if settled[v] {
                continue;
            }
            let l = labeling.labels[v].expect("unsettled vertices are labeled");
            if saturated || (l as f64) >= thresholds.lower {
                labels[v] = assign_label(l, p, thresholds);
                settled[v] = true;
            } else {
                all_settled = false;
            }
        }
        if all_settled {
            break;
        }
    }
    let peak = per_level_edges.iter().sum();
    (labels, SpaceStats::new(per_level_edges, peak, 0))
}
