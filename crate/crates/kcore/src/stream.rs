//! Insertion-only streaming sketch.
//!
//! The stream keeps one edge set per schedule level. An arriving edge joins
//! every level whose probability admits its rank, walking levels from the
//! shallowest up and stopping as soon as both endpoints settled at strictly
//! shallower levels. Each time a level gains an edge its labeling may be
//! recomputed; a vertex whose label reaches the lower threshold settles
//! there, freezes its estimate, and edges between settled vertices are
//! purged from deeper levels. Unsettled vertices receive their estimate at
//! finalize time from the saturated level, which by then holds exactly the
//! edges whose endpoints did not both settle earlier.
//!
//! Recomputing the labeling on every insertion is needlessly slow: a single
//! edge or protected-set change moves any label by at most one, so each
//! level tracks the largest unsettled label it saw at its last relabel plus
//! a count of changes since. While that optimistic bound stays below the
//! promotion threshold no settlement is possible and the relabel is
//! skipped. The skipped runs are exactly the ones that could not have
//! changed anything, so lazy and eager runs produce identical output; a
//! differential test holds them side by side.

use std::collections::BTreeSet;

use crate::peel::label_protected;
use crate::sampler::{EdgeHasher, LevelSchedule};
use crate::sketch::{assign_label, SketchParams, SpaceStats, Thresholds};
use crate::{Error, Result};

struct LevelState {
    edges: BTreeSet<(usize, usize)>,
    /// Largest label among unsettled vertices at the last relabel.
    max_unsettled_label: usize,
    /// Label-affecting events (edge adds, purges, protected-set growth)
    /// since the last relabel. Each moves any label by at most one.
    slack: usize,
}

impl LevelState {
    fn new() -> Self {
        LevelState { edges: BTreeSet::new(), max_unsettled_label: 0, slack: 0 }
    }
}

/// Streaming coreness sketch over edge insertions.
pub struct StreamSketch {
    n: usize,
    thresholds: Thresholds,
    schedule: LevelSchedule,
    hasher: EdgeHasher,
    eager: bool,
    levels: Vec<LevelState>,
    /// Level at which each vertex settled, if any.
    settled_level: Vec<Option<usize>>,
    labels: Vec<f64>,
    present: BTreeSet<(usize, usize)>,
    retained: usize,
    peak_retained: usize,
    relabels_run: usize,
    relabels_skipped: usize,
}

impl StreamSketch {
    pub fn new(n: usize, params: &SketchParams) -> Result<Self> {
        let (thresholds, schedule) = Thresholds::batch(n, params)?;
        Ok(Self::with_derived(n, params.seed, thresholds, schedule, false))
    }

    /// Eager variant that recomputes labels on every touched level. Output
    /// is identical to the default; this exists so tests can prove it.
    pub fn new_eager(n: usize, params: &SketchParams) -> Result<Self> {
        let (thresholds, schedule) = Thresholds::batch(n, params)?;
        Ok(Self::with_derived(n, params.seed, thresholds, schedule, true))
    }

    pub(crate) fn with_derived(
        n: usize,
        seed: u64,
        thresholds: Thresholds,
        schedule: LevelSchedule,
        eager: bool,
    ) -> Self {
        let levels = (0..schedule.levels()).map(|_| LevelState::new()).collect();
        StreamSketch {
            n,
            thresholds,
            schedule,
            hasher: EdgeHasher::new(seed),
            eager,
            levels,
            settled_level: vec![None; n],
            labels: vec![0.0; n],
            present: BTreeSet::new(),
            retained: 0,
            peak_retained: 0,
            relabels_run: 0,
            relabels_skipped: 0,
        }
    }

    fn check_edge(&self, u: usize, v: usize) -> Result<(usize, usize)> {
        if u == v {
            return Err(Error::InvalidArgument(format!("self loop at vertex {u}")));
        }
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidArgument(format!(
                "edge ({u}, {v}) out of range for {} vertices",
                self.n
            )));
        }
        Ok((u.min(v), u.max(v)))
    }

    fn settled_before(&self, v: usize, level: usize) -> bool {
        matches!(self.settled_level[v], Some(s) if s < level)
    }

    /// Feeds one edge. Returns `false` without touching any state when the
    /// edge is already present.
    pub fn insert(&mut self, u: usize, v: usize) -> Result<bool> {
        let key = self.check_edge(u, v)?;
        if !self.present.insert(key) {
            return Ok(false);
        }
        let first_level = self.schedule.level_of(self.hasher.rank(key.0, key.1));
        for j in 0..self.schedule.levels() {
            if self.settled_before(key.0, j) && self.settled_before(key.1, j) {
                break;
            }
            if j < first_level {
                continue;
            }
            self.levels[j].edges.insert(key);
            self.levels[j].slack += 1;
            self.retained += 1;
            self.peak_retained = self.peak_retained.max(self.retained);
            self.maybe_relabel(j);
        }
        Ok(true)
    }

    fn maybe_relabel(&mut self, level: usize) {
        if !self.eager {
            let state = &self.levels[level];
            let optimistic = state.max_unsettled_label + state.slack;
            if (optimistic as f64) < self.thresholds.lower {
                self.relabels_skipped += 1;
                return;
            }
        }
        self.relabel(level);
    }

    /// Recomputes the labeling of one level, settles every unsettled vertex
    /// whose label reached the lower threshold, and purges deeper levels.
    fn relabel(&mut self, level: usize) {
        self.relabels_run += 1;
        let labeling = {
            let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.n];
            for &(a, b) in &self.levels[level].edges {
                adj[a].push(b);
                adj[b].push(a);
            }
            let protected: Vec<bool> =
                (0..self.n).map(|v| self.settled_before(v, level)).collect();
            label_protected(self.n, |v| adj[v].iter().copied(), &protected)
        };
        let mut newly_settled = Vec::new();
        let mut max_unsettled = 0usize;
        for w in 0..self.n {
            if self.settled_level[w].is_some() {
                continue;
            }
            let l = labeling.labels[w].expect("unsettled vertices carry a label");
            if (l as f64) >= self.thresholds.lower {
                self.labels[w] = assign_label(l, self.schedule.prob(level), &self.thresholds);
                self.settled_level[w] = Some(level);
                newly_settled.push(w);
            } else {
                max_unsettled = max_unsettled.max(l);
            }
        }
        let state = &mut self.levels[level];
        state.slack = 0;
        state.max_unsettled_label = max_unsettled;
        if !newly_settled.is_empty() {
            self.purge_deeper(level, newly_settled.len());
        }
    }

    /// Drops, from every level deeper than `level`, the edges whose both
    /// endpoints have settled shallower than that level, and accounts for
    /// the protected-set growth in the lazy slack.
    fn purge_deeper(&mut self, level: usize, newly_settled: usize) {
        let settled = &self.settled_level;
        let mut freed = 0usize;
        for (j, state) in self.levels.iter_mut().enumerate().skip(level + 1) {
            let before = state.edges.len();
            state.edges.retain(|&(a, b)| {
                !(matches!(settled[a], Some(s) if s < j) && matches!(settled[b], Some(s) if s < j))
            });
            let removed = before - state.edges.len();
            freed += removed;
            state.slack += removed + newly_settled;
        }
        self.retained -= freed;
    }

    /// Number of edges currently held across all levels (an edge residing
    /// in several levels counts once per level).
    pub fn retained_edges(&self) -> usize {
        self.retained
    }

    pub fn peak_edges(&self) -> usize {
        self.peak_retained
    }

    pub fn settled_count(&self) -> usize {
        self.settled_level.iter().filter(|s| s.is_some()).count()
    }

    pub fn levels(&self) -> usize {
        self.schedule.levels()
    }

    pub fn level_edge_count(&self, level: usize) -> usize {
        self.levels[level].edges.len()
    }

    /// (relabels run, relabels skipped as provably fruitless)
    pub fn relabel_counts(&self) -> (usize, usize) {
        (self.relabels_run, self.relabels_skipped)
    }

    /// Labels every vertex that never settled from the saturated level and
    /// returns the estimates with the space profile.
    pub fn finalize(mut self) -> (Vec<f64>, SpaceStats) {
        let last = self.schedule.levels() - 1;
        let labeling = {
            let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.n];
            for &(a, b) in &self.levels[last].edges {
                adj[a].push(b);
                adj[b].push(a);
            }
            let protected: Vec<bool> =
                (0..self.n).map(|v| self.settled_before(v, last)).collect();
            label_protected(self.n, |v| adj[v].iter().copied(), &protected)
        };
        for w in 0..self.n {
            if self.settled_level[w].is_none() {
                let l = labeling.labels[w].expect("unsettled vertices carry a label");
                self.labels[w] = assign_label(l, 1.0, &self.thresholds);
                self.settled_level[w] = Some(last);
            }
        }
        let per_level: Vec<usize> = self.levels.iter().map(|s| s.edges.len()).collect();
        let stats = SpaceStats::new(per_level, self.peak_retained, 0);
        (self.labels, stats)
    }
}
