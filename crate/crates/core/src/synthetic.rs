//! Deterministic synthetic inputs for benchmarks and oracle tests.
//!
//! Weights are drawn from a dyadic set so inverse-weight distances and
//! their sums are exact in binary floating point; equal-length paths
//! compare exactly equal no matter the summation order.

use chrono::NaiveDate;

use crate::relevance::ThemeId;
use crate::wordnet::{CooccurrenceGraph, Granularity, GraphMeta, SliceWindow};

/// Tiny xorshift* generator; deterministic and platform-independent.
#[derive(Debug, Clone)]
pub struct TinyRng(u64);

impl TinyRng {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(2685821657736338717).max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x.wrapping_mul(0x2545f4914f6cdd1d)
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Weights whose reciprocals are exact dyadic rationals.
pub const DYADIC_WEIGHTS: [u64; 5] = [1, 2, 4, 8, 16];

fn meta(n_hint: usize) -> GraphMeta {
    GraphMeta {
        region_id: format!("synthetic_{n_hint}"),
        theme_id: ThemeId::Trade,
        slice: SliceWindow {
            start: NaiveDate::from_ymd_opt(2014, 1, 1).expect("valid date"),
            end: NaiveDate::from_ymd_opt(2019, 12, 31).expect("valid date"),
        },
        granularity: Granularity::Pooled,
        window: 7,
        canonical_token: "TRADE".into(),
        prune: None,
    }
}

/// A connected random graph: a random spanning tree plus `extra_edges`
/// random edges, weights from [`DYADIC_WEIGHTS`]. Node names are `n0..`.
pub fn random_connected_graph(n_nodes: usize, extra_edges: usize, seed: u64) -> CooccurrenceGraph {
    assert!(n_nodes >= 2);
    let mut rng = TinyRng::new(seed);
    let names: Vec<String> = (0..n_nodes).map(|i| format!("n{i}")).collect();
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();
    let weight = |rng: &mut TinyRng| DYADIC_WEIGHTS[rng.below(DYADIC_WEIGHTS.len())];
    for i in 1..n_nodes {
        let j = rng.below(i);
        edges.push((i, j, weight(&mut rng)));
    }
    let mut attempts = 0;
    let mut added = 0;
    while added < extra_edges && attempts < extra_edges * 20 {
        attempts += 1;
        let a = rng.below(n_nodes);
        let b = rng.below(n_nodes);
        if a == b || edges.iter().any(|&(x, y, _)| (x, y) == (a, b) || (x, y) == (b, a)) {
            continue;
        }
        edges.push((a, b, weight(&mut rng)));
        added += 1;
    }
    let named: Vec<(&str, &str, u64)> = edges
        .iter()
        .map(|&(a, b, w)| (names[a].as_str(), names[b].as_str(), w))
        .collect();
    let counts: Vec<(&str, u64)> = names.iter().map(|n| (n.as_str(), 1)).collect();
    CooccurrenceGraph::from_parts(meta(n_nodes), &counts, &named)
}

/// A random graph that may be disconnected: every possible edge appears
/// with roughly the given percent probability.
pub fn random_graph(n_nodes: usize, edge_percent: usize, seed: u64) -> CooccurrenceGraph {
    assert!(n_nodes >= 2);
    let mut rng = TinyRng::new(seed);
    let names: Vec<String> = (0..n_nodes).map(|i| format!("n{i}")).collect();
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();
    for i in 0..n_nodes {
        for j in (i + 1)..n_nodes {
            if rng.below(100) < edge_percent {
                let w = DYADIC_WEIGHTS[rng.below(DYADIC_WEIGHTS.len())];
                edges.push((i, j, w));
            }
        }
    }
    let named: Vec<(&str, &str, u64)> = edges
        .iter()
        .map(|&(a, b, w)| (names[a].as_str(), names[b].as_str(), w))
        .collect();
    let counts: Vec<(&str, u64)> = names.iter().map(|n| (n.as_str(), 1)).collect();
    CooccurrenceGraph::from_parts(meta(n_nodes), &counts, &named)
}

/// Random token sequences over a bounded vocabulary, for graph-build tests.
pub fn random_word_lists(
    n_lists: usize,
    max_len: usize,
    vocab_size: usize,
    seed: u64,
) -> Vec<Vec<String>> {
    let mut rng = TinyRng::new(seed);
    (0..n_lists)
        .map(|_| {
            let len = 1 + rng.below(max_len);
            (0..len).map(|_| format!("w{}", rng.below(vocab_size))).collect()
        })
        .collect()
}
