//! Single-process simulation of running the level sketch on a cluster.
//!
//! Edges are statically partitioned across machines by hash. Each executed
//! level costs two rounds: a map round where every machine filters its
//! shard down to the edges the level keeps (after hearing which vertices
//! have settled, hence the broadcast meter), and a reduce round where the
//! coordinator collects those edges and recomputes labels. The labels that
//! come out are bit-identical to the single-process sketch; the point of
//! the simulation is the communication ledger next to them.
//!
//! The optional pre-pass strips everything outside the 3-core first, in
//! simultaneous low-degree sweeps (one round each), and labels the removed
//! vertices from their exact coreness. That shrinks the shards before any
//! level work but makes the surviving labels a function of the pruned
//! graph, so it is off by default.

use crate::graph::Graph;
use crate::peel::peel_coreness;
use crate::sampler::EdgeHasher;
use crate::sketch::{run_leveled_with, SketchParams, SpaceStats, Thresholds};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterConfig {
    pub machines: usize,
    /// Per-round cap on edges handled by one machine; exceeding it is
    /// recorded, not fatal.
    pub budget: Option<usize>,
    /// Strip the complement of the 3-core before the level runs.
    pub prune3: bool,
}

impl ClusterConfig {
    pub fn new(machines: usize) -> Self {
        ClusterConfig { machines, budget: None, prune3: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetViolation {
    pub round: usize,
    pub machine: usize,
    pub load: usize,
}

/// Communication ledger of one simulated run. Rounds are numbered in
/// execution order: pruning sweeps first, then a map and a reduce round
/// per executed level.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrace {
    pub rounds: usize,
    pub prune_rounds: usize,
    /// Per executed level, how many of its edges each machine contributed.
    pub machine_loads: Vec<Vec<usize>>,
    /// Per executed level, how many edges the coordinator gathered.
    pub coordinator_loads: Vec<usize>,
    /// Size of the settled set announced at each level entry.
    pub broadcast_sizes: Vec<usize>,
    pub max_machine_load: usize,
    pub budget_violations: Vec<BudgetViolation>,
    /// log m / log n of the input graph; how far from sparse it sits.
    pub density_exponent: f64,
}

/// Runs the batch sketch as a simulated cluster job. Returns the same
/// labels and space profile as the plain run (when pruning is off) plus
/// the round-by-round load trace.
pub fn run_mr_sketch(
    g: &Graph,
    params: &SketchParams,
    cluster: &ClusterConfig,
) -> Result<(Vec<f64>, SpaceStats, RoundTrace)> {
    if cluster.machines == 0 {
        return Err(Error::InvalidArgument("need at least one machine".into()));
    }
    let n = g.vertex_count();
    let (thresholds, schedule) = Thresholds::batch(n, params)?;

    let mut prune_rounds = 0usize;
    let mut exact_overrides: Vec<(usize, f64)> = Vec::new();
    let pruned_graph;
    let work: &Graph = if cluster.prune3 {
        let mut alive = vec![true; n];
        let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
        loop {
            let doomed: Vec<usize> =
                (0..n).filter(|&v| alive[v] && degree[v] < 3).collect();
            if doomed.is_empty() {
                break;
            }
            prune_rounds += 1;
            for &v in &doomed {
                alive[v] = false;
            }
            for &v in &doomed {
                for &w in g.neighbors(v) {
                    if alive[w] {
                        degree[w] -= 1;
                    }
                }
            }
        }
        let exact = peel_coreness(g);
        for v in 0..n {
            if !alive[v] {
                debug_assert!(exact[v] < 3, "sweeps must only remove sub-3-core vertices");
                exact_overrides.push((v, (1.0 - thresholds.epsilon) * exact[v] as f64));
            }
        }
        let kept: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| alive[u] && alive[v])
            .collect();
        pruned_graph = Graph::from_canonical(n, kept);
        &pruned_graph
    } else {
        g
    };

    let hasher = EdgeHasher::new(params.seed);
    let mut machine_loads: Vec<Vec<usize>> = Vec::new();
    let mut coordinator_loads: Vec<usize> = Vec::new();
    let mut broadcast_sizes: Vec<usize> = Vec::new();
    let (mut labels, stats) =
        run_leveled_with(work, params.seed, &thresholds, &schedule, |_, held, settled| {
            let mut loads = vec![0usize; cluster.machines];
            for &(u, v) in held {
                loads[hasher.machine(u, v, cluster.machines)] += 1;
            }
            machine_loads.push(loads);
            coordinator_loads.push(held.len());
            broadcast_sizes.push(settled.iter().filter(|&&s| s).count());
        });
    for &(v, label) in &exact_overrides {
        labels[v] = label;
    }

    let executed = coordinator_loads.len();
    let rounds = prune_rounds + 2 * executed;
    let mut max_machine_load = 0usize;
    let mut budget_violations = Vec::new();
    for (k, loads) in machine_loads.iter().enumerate() {
        let map_round = prune_rounds + 2 * k;
        for (machine, &load) in loads.iter().enumerate() {
            max_machine_load = max_machine_load.max(load);
            if cluster.budget.is_some_and(|b| load > b) {
                budget_violations.push(BudgetViolation { round: map_round, machine, load });
            }
        }
        let gathered = coordinator_loads[k];
        max_machine_load = max_machine_load.max(gathered);
        if cluster.budget.is_some_and(|b| gathered > b) {
            budget_violations.push(BudgetViolation {
                round: map_round + 1,
                machine: 0,
                load: gathered,
            });
        }
    }
    let density_exponent = if n >= 2 && g.edge_count() >= 1 {
        (g.edge_count() as f64).ln() / (n as f64).ln()
    } else {
        0.0
    };
    let trace = RoundTrace {
        rounds,
        prune_rounds,
        machine_loads,
        coordinator_loads,
        broadcast_sizes,
        max_machine_load,
        budget_violations,
        density_exponent,
    };
    Ok((labels, stats, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::sketch::run_sketch;

    #[test]
    fn rejects_zero_machines() {
        let g = gen::gnp(30, 0.2, 1).unwrap();
        let params = SketchParams::theory(0.5, 2);
        let cluster = ClusterConfig { machines: 0, budget: None, prune3: false };
        assert!(run_mr_sketch(&g, &params, &cluster).is_err());
    }

    #[test]
    fn matches_plain_run_and_balances_books() {
        let cases = [
            // Saturated single level.
            (gen::gnp(120, 0.3, 9).unwrap(), SketchParams::theory(0.5, 9)),
            // Two levels, nothing settles before saturation.
            (gen::gnp(800, 0.03, 9).unwrap(), SketchParams::practical(1.0, 100_000, 2.0, 13)),
            // Two levels with heavy mid-run settlement.
            (gen::gnp(800, 0.01, 5).unwrap(), SketchParams::practical(1.0, 2, 2.0, 5)),
        ];
        for (g, params) in &cases {
            let cluster = ClusterConfig::new(4);
            let (labels, stats, trace) = run_mr_sketch(g, params, &cluster).unwrap();
            let (plain_labels, plain_stats) = run_sketch(g, params).unwrap();
            assert_eq!(labels, plain_labels);
            assert_eq!(stats, plain_stats);
            assert_eq!(trace.rounds, 2 * stats.levels());
            assert_eq!(trace.prune_rounds, 0);
            assert_eq!(trace.coordinator_loads, stats.per_level_edges);
            for (k, loads) in trace.machine_loads.iter().enumerate() {
                assert_eq!(loads.len(), 4);
                assert_eq!(loads.iter().sum::<usize>(), trace.coordinator_loads[k]);
            }
            assert_eq!(trace.broadcast_sizes[0], 0);
            assert!(trace.broadcast_sizes.windows(2).all(|w| w[0] <= w[1]));
            assert!(trace.budget_violations.is_empty());
            assert!(trace.density_exponent > 1.0 && trace.density_exponent < 2.0);

            let (labels2, _, trace2) = run_mr_sketch(g, params, &cluster).unwrap();
            assert_eq!(labels, labels2);
            assert_eq!(trace, trace2);
        }
    }

    #[test]
    fn tight_budget_is_recorded_not_fatal() {
        let g = gen::gnp(200, 0.08, 7).unwrap();
        let params = SketchParams::theory(0.6, 7);
        let cluster = ClusterConfig { machines: 3, budget: Some(1), prune3: false };
        let (labels, _, trace) = run_mr_sketch(&g, &params, &cluster).unwrap();
        let (plain_labels, _) = run_sketch(&g, &params).unwrap();
        assert_eq!(labels, plain_labels);
        assert!(!trace.budget_violations.is_empty());
        for v in &trace.budget_violations {
            assert!(v.load > 1);
            assert!(v.round < trace.rounds);
            assert!(v.machine < 3);
        }
    }

    #[test]
    fn prune_pass_labels_fringe_from_exact_coreness() {
        // K5 core, vertex 5 hanging off it holding three leaves: the
        // leaves go in the first sweep, vertex 5 only in the second.
        let mut edges = Vec::new();
        for u in 0..5usize {
            for v in u + 1..5 {
                edges.push((u, v));
            }
        }
        edges.extend([(4, 5), (5, 6), (5, 7), (5, 8)]);
        let g = Graph::new(9, edges).unwrap();
        let params = SketchParams::theory(0.5, 3);
        let cluster = ClusterConfig { machines: 2, budget: None, prune3: true };
        let (labels, stats, trace) = run_mr_sketch(&g, &params, &cluster).unwrap();
        assert_eq!(trace.prune_rounds, 2);
        assert_eq!(trace.rounds, 2 + 2 * stats.levels());
        for (v, &label) in labels.iter().enumerate() {
            if v < 5 {
                assert_eq!(label, 2.0, "clique vertex {v} has coreness 4");
            } else {
                assert_eq!(label, 0.5, "fringe vertex {v} has coreness 1");
            }
        }
        // Only clique edges survive pruning.
        assert_eq!(stats.per_level_edges.iter().max(), Some(&10));
    }

    #[test]
    fn prune_pass_is_a_no_op_on_dense_graphs() {
        let g = Graph::complete(12);
        let params = SketchParams::theory(0.7, 5);
        let on = ClusterConfig { machines: 2, budget: None, prune3: true };
        let off = ClusterConfig { machines: 2, budget: None, prune3: false };
        let (with_prune, _, trace_on) = run_mr_sketch(&g, &params, &on).unwrap();
        let (without, _, trace_off) = run_mr_sketch(&g, &params, &off).unwrap();
        assert_eq!(trace_on.prune_rounds, 0);
        assert_eq!(with_prune, without);
        assert_eq!(trace_on.rounds, trace_off.rounds);
    }
}
