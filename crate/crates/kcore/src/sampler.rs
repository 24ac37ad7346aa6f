//! Keyed edge hashing and the geometric level schedule.
//!
//! Every sampling decision in this crate derives from a single number per
//! edge: a rank in `[0, 1)` produced by a keyed mixer over the canonical
//! endpoint pair. An edge belongs to level `j` of a schedule exactly when
//! its rank is at most the level's probability, so the level subgraphs are
//! nested by construction and identical across batch, streaming, turnstile,
//! and simulated cluster runs that share a seed.
//!
//! The mixer is a fixed-point avalanche (the splitmix64 finalizer) applied
//! to the seeded combination of both endpoints. It is not cryptographic; it
//! is stable across platforms and good enough for the concentration bounds
//! the samplers rely on, which the tests check empirically.

use crate::graph::Graph;
use crate::{Error, Result};

const GOLDEN: u64 = 0x9e3779b97f4a7c15;
const SECOND: u64 = 0xc2b2ae3d27d4eb4f;
const MACHINE_TAG: u64 = 0xa0761d6478bd642f;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Keyed hash over undirected edges. Two hashers agree exactly when their
/// seeds agree; the endpoint order never matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeHasher {
    seed: u64,
}

impl EdgeHasher {
    pub fn new(seed: u64) -> Self {
        EdgeHasher { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn raw(&self, u: usize, v: usize) -> u64 {
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        let mut h = self.seed ^ GOLDEN;
        h = mix64(h ^ (lo as u64).wrapping_mul(GOLDEN));
        h = mix64(h ^ (hi as u64).wrapping_mul(SECOND));
        mix64(h)
    }

    /// Uniform rank in `[0, 1)` built from the top 53 bits of the hash, so
    /// the value is exactly representable and never rounds up to 1.0.
    pub fn rank(&self, u: usize, v: usize) -> f64 {
        (self.raw(u, v) >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Deterministic machine assignment for partitioned processing, keyed
    /// independently of the rank stream.
    pub fn machine(&self, u: usize, v: usize, machines: usize) -> usize {
        assert!(machines > 0, "need at least one machine");
        (mix64(self.raw(u, v) ^ MACHINE_TAG) % machines as u64) as usize
    }
}

/// Geometrically growing sampling probabilities, clamped at 1.
///
/// Level `j` has probability `min(1, p0 * growth^j)`; the schedule stops at
/// the first level that reaches 1, which always exists and makes the final
/// level keep every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSchedule {
    probs: Vec<f64>,
}

impl LevelSchedule {
    pub fn new(p0: f64, growth: f64) -> Result<Self> {
        if p0 <= 0.0 || !p0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "base probability must be positive and finite, got {p0}"
            )));
        }
        if growth <= 1.0 || !growth.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "growth factor must exceed 1, got {growth}"
            )));
        }
        let mut probs = Vec::new();
        let mut p = p0;
        while p < 1.0 {
            probs.push(p);
            p *= growth;
        }
        probs.push(1.0);
        Ok(LevelSchedule { probs })
    }

    pub fn levels(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, level: usize) -> f64 {
        self.probs[level]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// The shallowest level whose probability admits this rank. Total on
    /// `[0, 1)` because the last level keeps everything.
    pub fn level_of(&self, rank: f64) -> usize {
        self.probs
            .iter()
            .position(|&p| rank <= p)
            .expect("final level has probability 1")
    }
}

/// The subgraph of edges whose rank passes level `j` of the schedule.
pub fn sample_level(g: &Graph, hasher: &EdgeHasher, schedule: &LevelSchedule, level: usize) -> Graph {
    let p = schedule.prob(level);
    let kept: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| hasher.rank(u, v) <= p)
        .collect();
    Graph::from_canonical(g.vertex_count(), kept)
}
