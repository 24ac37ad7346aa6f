//! A graph with blocks of very different density should resolve them at
//! different rungs of the sampling ladder: the densest block settles at the
//! first level whose sample is rich enough, and its edges stop occupying
//! every deeper level.

use kcore::gen;
use kcore::graph::Graph;
use kcore::{run_sketch, SketchParams};

const BIG: usize = 2_200;
const SMALL: usize = 500;
const PATH: usize = 1_400;

/// One big clique, one small clique, one path, pairwise disconnected.
fn layered_graph() -> Graph {
    let n = BIG + SMALL + PATH;
    let mut edges = Vec::new();
    for a in 0..BIG {
        for b in a + 1..BIG {
            edges.push((a, b));
        }
    }
    for a in BIG..BIG + SMALL {
        for b in a + 1..BIG + SMALL {
            edges.push((a, b));
        }
    }
    for a in BIG + SMALL..n - 1 {
        edges.push((a, a + 1));
    }
    Graph::new(n, edges).unwrap()
}

#[test]
fn dense_block_settles_one_level_before_saturation() {
    let g = layered_graph();
    let n = g.vertex_count();
    assert_eq!(n, 4_100);
    let small_clique_edges = SMALL * (SMALL - 1) / 2;
    let path_edges = PATH - 1;

    for seed in 0..5u64 {
        // At this size and accuracy the ladder runs four levels with the
        // third sampling just under everything (p = 0.96) and the fourth
        // saturated.
        let (labels, stats) = run_sketch(&g, &SketchParams::theory(0.9, seed)).unwrap();
        assert_eq!(stats.levels(), 4, "seed {seed}");

        // The big clique is still in play at the third level...
        assert!(
            stats.per_level_edges[2] >= 2_350_000,
            "seed {seed}: level 2 held only {} edges",
            stats.per_level_edges[2]
        );
        // ...but settles there, so the saturated level holds exactly the
        // small clique and the path.
        assert_eq!(
            stats.per_level_edges[3],
            small_clique_edges + path_edges,
            "seed {seed}: the big clique leaked into the saturated level"
        );

        // Big-clique labels carry the third level's rescaling and sit in
        // the window the promotion thresholds allow; the small clique only
        // resolves at saturation, where its label is its exact coreness
        // shrunk by the accuracy factor; the path barely registers.
        for (v, &label) in labels.iter().enumerate() {
            if v < BIG {
                assert!(
                    label > 205.0 && label < 410.1,
                    "seed {seed}: big-clique vertex {v} labeled {label}"
                );
            } else if v < BIG + SMALL {
                assert!(
                    (label - 0.1 * (SMALL - 1) as f64).abs() < 1e-9,
                    "seed {seed}: small-clique vertex {v} labeled {label}"
                );
            } else {
                assert!(
                    label > 0.0 && label < 0.2,
                    "seed {seed}: path vertex {v} labeled {label}"
                );
            }
        }
    }
}

#[test]
fn growth_factor_controls_ladder_depth() {
    // A promotion threshold far above any label keeps every vertex in play
    // until the saturated level, so the executed depth is the schedule's.
    let g = gen::gnp(3_000, 0.01, 11).unwrap();
    let fine = SketchParams::practical(0.9, 100, 1.5, 11);
    let coarse = SketchParams::practical(0.9, 100, 4.0, 11);
    let (fine_labels, fine_stats) = run_sketch(&g, &fine).unwrap();
    let (coarse_labels, coarse_stats) = run_sketch(&g, &coarse).unwrap();
    assert!(
        fine_stats.levels() > coarse_stats.levels(),
        "slower growth must take more levels: {} vs {}",
        fine_stats.levels(),
        coarse_stats.levels()
    );
    // Both runs resolve everything at their saturated level, so the labels
    // agree exactly despite the different ladders.
    assert_eq!(fine_labels, coarse_labels);
}
