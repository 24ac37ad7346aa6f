//! Deterministic graph generators used by the test suites and the CLI.
//!
//! Everything here is seeded explicitly; the same arguments always produce
//! the same graph, byte for byte.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeSet;

use crate::graph::Graph;
use crate::{Error, Result};

/// A chain of overlapping dense blocks that stalls threshold pruning.
///
/// Vertices come in groups of five. Each group `i` (except the last two)
/// wires its vertices 1..=3 to its own vertex 4, to the anchor of the next
/// group, and to their counterpart in the next group; consecutive anchors
/// are joined; the last five vertices form a clique. Vertex 0 is isolated.
/// Pruning at threshold 4 eats exactly one group per sweep, so the number
/// of sweeps grows linearly with `n`.
///
/// `n` must be a positive multiple of 5, at least 10.
pub fn hard_instance(n: usize) -> Result<Graph> {
    if n < 10 || !n.is_multiple_of(5) {
        return Err(Error::InvalidArgument(format!(
            "hard instance needs n >= 10 divisible by 5, got {n}"
        )));
    }
    let mut edges = Vec::new();
    let blocks = (n - 10) / 5;
    for i in 0..=blocks {
        for j in 1..=3 {
            edges.push((5 * i + j, 5 * i + 4));
            edges.push((5 * i + j, 5 * (i + 1)));
            edges.push((5 * i + j, 5 * (i + 1) + j));
        }
        edges.push((5 * i + 4, 5 * (i + 1)));
    }
    for a in n - 5..n {
        for b in a + 1..n {
            edges.push((a, b));
        }
    }
    Ok(Graph::new(n, edges)?)
}

/// Erdos-Renyi graph: each of the `n * (n - 1) / 2` vertex pairs is an edge
/// independently with probability `p`. Uses geometric jumps between chosen
/// pairs, so the cost is proportional to the number of edges produced.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("edge probability {p} outside [0, 1]")));
    }
    if p >= 1.0 {
        return Ok(Graph::complete(n));
    }
    if p <= 0.0 || n < 2 {
        return Ok(Graph::empty(n));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let log_skip = (1.0 - p).ln();
    let mut edges = Vec::new();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / log_skip).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    Ok(Graph::new(n, edges)?)
}

/// Random graph with `n * d / 2` distinct edges, so the average degree is
/// close to `d`. Pairs are drawn uniformly and deduplicated; no attempt is
/// made to equalize individual degrees.
pub fn regularish(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if n < 2 || d == 0 {
        return Ok(Graph::empty(n));
    }
    if d >= n {
        return Err(Error::InvalidArgument(format!(
            "average degree {d} impossible with {n} vertices"
        )));
    }
    let target = n * d / 2;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut chosen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut attempts = 0usize;
    let cap = 50 * target + 100;
    while chosen.len() < target && attempts < cap {
        attempts += 1;
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        chosen.insert((u.min(v), u.max(v)));
    }
    Ok(Graph::new(n, chosen.into_iter().collect())?)
}

/// `cliques` cliques of `size` vertices each, consecutive cliques joined by
/// a single bridge edge. Vertex ids are contiguous per clique.
pub fn clique_chain(cliques: usize, size: usize) -> Result<Graph> {
    if cliques == 0 || size == 0 {
        return Ok(Graph::empty(0));
    }
    let n = cliques * size;
    let mut edges = Vec::new();
    for c in 0..cliques {
        let base = c * size;
        for a in 0..size {
            for b in a + 1..size {
                edges.push((base + a, base + b));
            }
        }
        if c + 1 < cliques {
            edges.push((base + size - 1, base + size));
        }
    }
    Ok(Graph::new(n, edges)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peel::{peel_coreness, threshold_probe_rounds};
    use std::collections::BTreeMap;

    fn coreness_profile(g: &Graph) -> BTreeMap<usize, usize> {
        let mut profile = BTreeMap::new();
        for c in peel_coreness(g) {
            *profile.entry(c).or_insert(0) += 1;
        }
        profile
    }

    #[test]
    fn hard_instance_rejects_bad_sizes() {
        assert!(hard_instance(5).is_err());
        assert!(hard_instance(12).is_err());
        assert!(hard_instance(10).is_ok());
    }

    #[test]
    fn hard_instance_small_profile() {
        let g = hard_instance(10).unwrap();
        // One isolated vertex, four vertices of coreness 3, the clique at 4.
        let profile = coreness_profile(&g);
        assert_eq!(profile, BTreeMap::from([(0, 1), (3, 4), (4, 5)]));
    }

    #[test]
    fn hard_instance_large_profile() {
        let g = hard_instance(1005).unwrap();
        let profile = coreness_profile(&g);
        assert_eq!(profile, BTreeMap::from([(0, 1), (3, 999), (4, 5)]));
    }

    #[test]
    fn hard_instance_probe_cadence() {
        for n in [10usize, 15, 1005] {
            let g = hard_instance(n).unwrap();
            let out = threshold_probe_rounds(&g, 4);
            assert_eq!(out.rounds, (n - 5) / 5, "n={n}");
            assert_eq!(out.survivors, (n - 5..n).collect::<Vec<_>>(), "n={n}");
        }
    }

    #[test]
    fn hard_instance_probe_below_and_above() {
        let g = hard_instance(1005).unwrap();
        // Threshold 3 only removes the isolated vertex, in the first sweep.
        let low = threshold_probe_rounds(&g, 3);
        assert_eq!(low.rounds, 0);
        assert_eq!(low.survivors.len(), 1004);
        // Threshold 5 exceeds every coreness; two sweeps flatten the graph.
        let high = threshold_probe_rounds(&g, 5);
        assert_eq!(high.rounds, 1);
        assert!(high.survivors.is_empty());
    }

    #[test]
    fn gnp_is_deterministic_and_seed_sensitive() {
        let a = gnp(100, 0.1, 7).unwrap();
        let b = gnp(100, 0.1, 7).unwrap();
        let c = gnp(100, 0.1, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn gnp_extremes() {
        assert_eq!(gnp(6, 1.0, 0).unwrap(), Graph::complete(6));
        assert_eq!(gnp(6, 0.0, 0).unwrap().edge_count(), 0);
        assert!(gnp(6, 1.5, 0).is_err());
    }

    #[test]
    fn gnp_edge_count_near_expectation() {
        let n = 400usize;
        let p = 0.05;
        let expect = (n * (n - 1) / 2) as f64 * p;
        let sd = (expect * (1.0 - p)).sqrt();
        let g = gnp(n, p, 123).unwrap();
        let got = g.edge_count() as f64;
        assert!((got - expect).abs() < 5.0 * sd, "edges {got} vs expectation {expect}");
    }

    #[test]
    fn regularish_hits_edge_budget() {
        let g = regularish(200, 6, 9).unwrap();
        assert_eq!(g.edge_count(), 600);
        let mean = 2.0 * g.edge_count() as f64 / 200.0;
        assert!((mean - 6.0).abs() < 1e-9);
        assert_eq!(g, regularish(200, 6, 9).unwrap());
    }

    #[test]
    fn clique_chain_structure() {
        let g = clique_chain(3, 4).unwrap();
        assert_eq!(g.vertex_count(), 12);
        // Three K4 blocks plus two bridges.
        assert_eq!(g.edge_count(), 3 * 6 + 2);
        let core = peel_coreness(&g);
        assert!(core.iter().all(|&c| c == 3));
    }
}
