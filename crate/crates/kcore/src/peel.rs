//! Exact coreness computation and its building blocks.
//!
//! `peel_coreness` is the classic min-degree peeling. `exclusive_coreness_labeling`
//! generalizes it with a protected vertex set: protected vertices are never
//! removed or labeled, but their incident edges keep counting toward the
//! degrees of everyone else. With an empty protected set the two agree; the
//! two functions intentionally use different data structures so they can
//! check each other.
//!
//! Ties during peeling always break toward the smallest vertex id, which
//! pins the removal order (and therefore demotion order downstream) for a
//! given graph.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use crate::graph::Graph;
use crate::{Error, Result};

/// Output of [`exclusive_coreness_labeling`]: a label for every vertex
/// outside the protected set (`None` for protected vertices), plus the
/// order in which vertices were removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    pub labels: Vec<Option<usize>>,
    pub removal_order: Vec<usize>,
}

/// Exact coreness of every vertex by iterated min-degree removal, backed by
/// a lazy-deletion binary heap keyed `(degree, vertex)`.
pub fn peel_coreness(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..n).map(|v| Reverse((deg[v], v))).collect();
    let mut removed = vec![false; n];
    let mut core = vec![0usize; n];
    let mut level = 0usize;
    while let Some(Reverse((d, v))) = heap.pop() {
        if removed[v] || d != deg[v] {
            continue; // stale entry
        }
        removed[v] = true;
        level = level.max(d);
        core[v] = level;
        for &w in g.neighbors(v) {
            if !removed[w] {
                deg[w] -= 1;
                heap.push(Reverse((deg[w], w)));
            }
        }
    }
    core
}

/// Min-degree labeling that never touches `protected` vertices.
///
/// The level counter starts at 0; while any unprotected vertex has degree
/// at most the current level it is removed (smallest degree first, smallest
/// id among ties) and labeled with the level; afterwards the level rises.
/// Protected vertices persist to the end and keep contributing degree.
/// Degree-0 vertices are labeled 0.
pub fn exclusive_coreness_labeling(g: &Graph, protected: &[usize]) -> Result<Labeling> {
    let n = g.vertex_count();
    let mut mask = vec![false; n];
    for &v in protected {
        if v >= n {
            return Err(Error::InvalidArgument(format!(
                "protected vertex {v} out of range for {n} vertices"
            )));
        }
        mask[v] = true;
    }
    let adj: Vec<&[usize]> = (0..n).map(|v| g.neighbors(v)).collect();
    Ok(label_protected(n, |v| adj[v].iter().copied(), &mask))
}

/// Worker shared with the streaming and turnstile states, which relabel
/// edge-set snapshots rather than `Graph` values. `neighbors(v)` must
/// enumerate each neighbor exactly once.
pub(crate) fn label_protected<I, F>(n: usize, neighbors: F, protected: &[bool]) -> Labeling
where
    I: Iterator<Item = usize>,
    F: Fn(usize) -> I,
{
    let mut deg = vec![0usize; n];
    let mut maxdeg = 0;
    for v in 0..n {
        deg[v] = neighbors(v).count();
        if !protected[v] {
            maxdeg = maxdeg.max(deg[v]);
        }
    }
    let mut buckets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); maxdeg + 1];
    let mut remaining = 0usize;
    for v in 0..n {
        if !protected[v] {
            buckets[deg[v]].insert(v);
            remaining += 1;
        }
    }
    let mut labels = vec![None; n];
    let mut removal_order = Vec::with_capacity(remaining);
    let mut level = 0usize;
    let mut cur = 0usize;
    while remaining > 0 {
        while buckets[cur].is_empty() {
            cur += 1;
        }
        level = level.max(cur);
        let v = buckets[cur].pop_first().expect("nonempty bucket");
        labels[v] = Some(level);
        removal_order.push(v);
        remaining -= 1;
        for w in neighbors(v) {
            if !protected[w] && labels[w].is_none() {
                let d = deg[w];
                buckets[d].remove(&w);
                deg[w] = d - 1;
                buckets[d - 1].insert(w);
                cur = cur.min(d - 1);
            }
        }
    }
    Labeling { labels, removal_order }
}

/// Coreness by exhaustive search over all vertex subsets: the coreness of
/// `v` is the largest minimum induced degree over subsets containing `v`.
/// Exponential; refuses graphs with more than 14 vertices.
pub fn brute_force_coreness_exhaustive(g: &Graph) -> Result<Vec<usize>> {
    let n = g.vertex_count();
    if n > 14 {
        return Err(Error::InvalidArgument(format!(
            "exhaustive coreness is capped at 14 vertices, got {n}"
        )));
    }
    let mut adj_mask = vec![0u32; n];
    for &(u, v) in g.edges() {
        adj_mask[u] |= 1 << v;
        adj_mask[v] |= 1 << u;
    }
    let mut best = vec![0usize; n];
    for mask in 1u32..(1 << n) {
        let mut min_deg = usize::MAX;
        let mut bits = mask;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            min_deg = min_deg.min((adj_mask[v] & mask).count_ones() as usize);
        }
        let mut bits = mask;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            best[v] = best[v].max(min_deg);
        }
    }
    Ok(best)
}

/// Coreness by repeated pruning: for each threshold `k`, delete vertices of
/// induced degree below `k` until stable; survivors have coreness at least
/// `k`. Independent of the peeling order logic, works for any size.
pub fn brute_force_coreness_fixpoint(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut core = vec![0usize; n];
    let mut k = 1usize;
    loop {
        let mut alive = vec![true; n];
        let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
        loop {
            let doomed: Vec<usize> = (0..n).filter(|&v| alive[v] && deg[v] < k).collect();
            if doomed.is_empty() {
                break;
            }
            for &v in &doomed {
                alive[v] = false;
            }
            for &v in &doomed {
                for &w in g.neighbors(v) {
                    if alive[w] {
                        deg[w] -= 1;
                    }
                }
            }
        }
        let mut any = false;
        for v in 0..n {
            if alive[v] {
                core[v] = k;
                any = true;
            }
        }
        if !any {
            return core;
        }
        k += 1;
    }
}

/// The `k`-core: the maximal induced subgraph of minimum degree `k`,
/// relabeled onto contiguous ids. Returns the subgraph and the sorted
/// original ids of its members (new id `i` = original `vertices[i]`).
pub fn kcore_subgraph(g: &Graph, k: usize) -> (Graph, Vec<usize>) {
    let core = peel_coreness(g);
    let members: BTreeSet<usize> = (0..g.vertex_count()).filter(|&v| core[v] >= k).collect();
    g.induced(&members)
}

/// Checks that `h` is a `(1 - eps)`-approximate `k`-core of `g`: it must
/// contain the exact `k`-core, and every member's degree induced by `h`
/// must be at least `(1 - eps) * k`.
pub fn check_approx_kcore(g: &Graph, h: &BTreeSet<usize>, k: usize, eps: f64) -> bool {
    let n = g.vertex_count();
    if h.iter().any(|&v| v >= n) {
        return false;
    }
    let core = peel_coreness(g);
    if (0..n).any(|v| core[v] >= k && !h.contains(&v)) {
        return false;
    }
    let need = (1.0 - eps) * k as f64;
    for &v in h {
        let d = g.neighbors(v).iter().filter(|w| h.contains(w)).count();
        if (d as f64) < need {
            return false;
        }
    }
    true
}

/// Result of [`threshold_probe_rounds`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeOutcome {
    pub rounds: usize,
    pub survivors: Vec<usize>,
}

/// Repeatedly deletes, in simultaneous sweeps, every remaining vertex whose
/// current induced degree is below `d`, until a sweep deletes nothing.
///
/// Sweeps are numbered from zero: the sweep over the input graph is round 0,
/// and `rounds` is the index of the last sweep that deleted anything (0 when
/// the graph is already stable). Counted this way, the chain construction
/// from [`crate::gen::hard_instance`] takes exactly `(n - 5) / 5` rounds to
/// cut down to its closing clique at `d = 4`.
pub fn threshold_probe_rounds(g: &Graph, d: usize) -> ProbeOutcome {
    let n = g.vertex_count();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut sweeps = 0usize;
    loop {
        let doomed: Vec<usize> = (0..n).filter(|&v| alive[v] && deg[v] < d).collect();
        if doomed.is_empty() {
            break;
        }
        sweeps += 1;
        for &v in &doomed {
            alive[v] = false;
        }
        for &v in &doomed {
            for &w in g.neighbors(v) {
                if alive[w] {
                    deg[w] -= 1;
                }
            }
        }
    }
    ProbeOutcome {
        rounds: sweeps.saturating_sub(1),
        survivors: (0..n).filter(|&v| alive[v]).collect(),
    }
}
