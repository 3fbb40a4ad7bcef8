//! Semantic importance of a theme in one slice's word network.
//!
//! The score has three components, each computed per node and standardized
//! across the slice's graph:
//!
//! - prevalence: occurrence count of the token in the slice's relevant
//!   passages (not its degree);
//! - diversity: distinctiveness centrality,
//!   `D(i) = Σ_j w_ij · log10((n−1) / deg(j))` over neighbors `j`;
//! - connectivity: weighted betweenness centrality under inverse-weight
//!   distances, computed exactly with Brandes' accumulation.
//!
//! The score is the sum of the three standardized components for the
//! theme's canonical token.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::Passage;
use crate::relevance::{ThemeId, ThemeQuery};
use crate::wordnet::{CooccurrenceGraph, Granularity, PruneParams, SliceWindow};

#[derive(Debug, Error)]
pub enum SbsError {
    #[error("distinctiveness needs at least 2 nodes, graph has {0}")]
    DegenerateGraph(usize),
    #[error("edge {a}-{b} has nonpositive weight {w}")]
    NonpositiveWeight { a: String, b: String, w: u64 },
    #[error("cannot tabulate an empty score set")]
    EmptyTable,
}

/// Raw occurrence count of `token` in the passages, after theme keywords
/// are merged into the canonical token. Absent tokens count 0.
pub fn prevalence(passages: &[Passage], theme: &ThemeQuery, token: &str) -> u64 {
    let mut count = 0u64;
    for p in passages {
        for t in &p.tokens {
            let tok = if theme.keywords.binary_search(&t.text).is_ok() {
                theme.canonical_token.as_str()
            } else {
                t.text.as_str()
            };
            if tok == token {
                count += 1;
            }
        }
    }
    count
}

/// Occurrence counts for every token after keyword merging.
fn prevalence_counts(passages: &[Passage], theme: &ThemeQuery) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for p in passages {
        for t in &p.tokens {
            let tok = if theme.keywords.binary_search(&t.text).is_ok() {
                theme.canonical_token.as_str()
            } else {
                t.text.as_str()
            };
            *counts.entry(tok.to_string()).or_insert(0) += 1;
        }
    }
    counts
}

/// Distinctiveness centrality of every node:
/// `D(i) = Σ_{j ∈ N(i)} w_ij · log10((n−1) / deg(j))`
/// where `deg(j)` counts distinct neighbors and `n` is the node count.
/// Nonnegative because `deg(j) ≤ n−1`. Fails on graphs with fewer than
/// two nodes.
pub fn distinctiveness_all(g: &CooccurrenceGraph) -> Result<Vec<f64>, SbsError> {
    let n = g.node_count();
    if n < 2 {
        return Err(SbsError::DegenerateGraph(n));
    }
    let n_minus_1 = (n - 1) as f64;
    let mut out = vec![0.0; n];
    for (i, d) in out.iter_mut().enumerate() {
        let mut sum = 0.0;
        for (j, w) in g.neighbors(i) {
            sum += w as f64 * (n_minus_1 / g.degree(j) as f64).log10();
        }
        *d = sum;
    }
    Ok(out)
}

/// Distinctiveness centrality of one token. 0 for isolated or absent nodes.
pub fn distinctiveness(g: &CooccurrenceGraph, token: &str) -> Result<f64, SbsError> {
    let all = distinctiveness_all(g)?;
    Ok(g.node_id(token).map_or(0.0, |i| all[i]))
}

/// Heap entry ordered by (distance, node), smallest first. Node index as a
/// tiebreak keeps the settle order, and hence floating-point accumulation,
/// fully deterministic.
#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One Dijkstra pass plus dependency accumulation from `source`.
fn accumulate_from_source(source: usize, adj: &[Vec<(usize, f64)>], acc: &mut [f64]) {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut sigma = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut settled: Vec<usize> = Vec::with_capacity(n);
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();

    dist[source] = 0.0;
    sigma[source] = 1.0;
    heap.push(HeapEntry {
        dist: 0.0,
        node: source,
    });

    while let Some(HeapEntry { dist: d, node: v }) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        settled.push(v);
        for &(w, len) in &adj[v] {
            if done[w] {
                continue;
            }
            let nd = d + len;
            if nd < dist[w] {
                dist[w] = nd;
                sigma[w] = sigma[v];
                preds[w].clear();
                preds[w].push(v);
                heap.push(HeapEntry { dist: nd, node: w });
            } else if nd == dist[w] {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }

    let mut delta = vec![0.0f64; n];
    while let Some(w) = settled.pop() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if w != source {
            acc[w] += delta[w];
        }
    }
}

/// Exact weighted betweenness centrality of every node.
///
/// Edge distance is `1 / weight`; shortest-path counts follow Brandes'
/// accumulation. Pairs are unordered, endpoints excluded, no normalization;
/// disconnected pairs contribute 0. Sources are processed in fixed chunks
/// and partial sums reduced in chunk order, so results are bit-identical
/// for any thread count.
pub fn betweenness_all(g: &CooccurrenceGraph) -> Result<Vec<f64>, SbsError> {
    let n = g.node_count();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        for (j, w) in g.neighbors(i) {
            if w == 0 {
                return Err(SbsError::NonpositiveWeight {
                    a: g.node_names()[i].clone(),
                    b: g.node_names()[j].clone(),
                    w,
                });
            }
            adj[i].push((j, 1.0 / w as f64));
        }
    }

    const CHUNK: usize = 64;
    let n_chunks = n.div_ceil(CHUNK);
    let partials: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = vec![0.0f64; n];
                for s in (c * CHUNK)..((c + 1) * CHUNK).min(n) {
                    accumulate_from_source(s, &adj, &mut acc);
                }
                acc
            })
            .collect()
    };

    let mut bc = vec![0.0f64; n];
    for partial in &partials {
        for (b, p) in bc.iter_mut().zip(partial) {
            *b += p;
        }
    }
    // Each unordered pair was accumulated from both endpoints.
    for b in &mut bc {
        *b *= 0.5;
    }
    Ok(bc)
}

/// Weighted betweenness of one token; absent tokens score 0.
pub fn weighted_betweenness(g: &CooccurrenceGraph, token: &str) -> Result<f64, SbsError> {
    let all = betweenness_all(g)?;
    Ok(g.node_id(token).map_or(0.0, |i| all[i]))
}

/// Z-scores with the population standard deviation. A constant vector maps
/// to all zeros; a single value maps to 0.
pub fn standardize(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    if values.iter().all(|v| *v == values[0]) {
        return vec![0.0; n];
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let sd = var.sqrt();
    if sd == 0.0 {
        return vec![0.0; n];
    }
    values.iter().map(|v| (v - mean) / sd).collect()
}

/// Graph parameters a score was computed under.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreProvenance {
    pub window: usize,
    pub prune: Option<PruneParams>,
    /// Weight-to-distance transform used for betweenness.
    pub distance_transform: &'static str,
    pub node_count: usize,
    pub edge_count: usize,
}

/// The semantic importance of one theme in one (region, slice).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SbsScore {
    pub region_id: String,
    pub theme_id: ThemeId,
    pub slice: SliceWindow,
    pub granularity: Granularity,
    /// Raw component values for the canonical token.
    pub prevalence: u64,
    pub diversity: f64,
    pub connectivity: f64,
    /// Standardized components; their exact sum is `sbs_raw`.
    pub z_prevalence: f64,
    pub z_diversity: f64,
    pub z_connectivity: f64,
    pub sbs_raw: f64,
    /// Raw score minus the per-(theme, slice) minimum across regions;
    /// equals `sbs_raw` until [`shift_scores`] runs.
    pub sbs_shifted: f64,
    pub provenance: ScoreProvenance,
}

/// Compute the score of the theme's canonical token in one slice graph.
///
/// All three metrics are computed for every node, standardized across the
/// graph's nodes, and the canonical token's z-scores summed. When the
/// canonical token is absent its raw zeros join the node population of the
/// augmented graph, which typically yields a low (often negative) raw score.
pub fn compute_sbs(
    g: &CooccurrenceGraph,
    passages: &[Passage],
    theme: &ThemeQuery,
) -> Result<SbsScore, SbsError> {
    let n = g.node_count();
    let counts = prevalence_counts(passages, theme);
    let mut prev_vec: Vec<f64> = g
        .node_names()
        .iter()
        .map(|t| counts.get(t).copied().unwrap_or(0) as f64)
        .collect();
    let mut div_vec = if n >= 2 {
        distinctiveness_all(g)?
    } else {
        vec![0.0; n]
    };
    let mut conn_vec = betweenness_all(g)?;

    let canonical_idx = match g.node_id(&theme.canonical_token) {
        Some(i) => i,
        None => {
            prev_vec.push(0.0);
            div_vec.push(0.0);
            conn_vec.push(0.0);
            prev_vec.len() - 1
        }
    };

    let z_prev = standardize(&prev_vec);
    let z_div = standardize(&div_vec);
    let z_conn = standardize(&conn_vec);

    let (zp, zd, zc) = (
        z_prev[canonical_idx],
        z_div[canonical_idx],
        z_conn[canonical_idx],
    );
    let sbs_raw = zp + zd + zc;
    Ok(SbsScore {
        region_id: g.meta().region_id.clone(),
        theme_id: theme.theme_id,
        slice: g.meta().slice,
        granularity: g.meta().granularity,
        prevalence: prev_vec[canonical_idx] as u64,
        diversity: div_vec[canonical_idx],
        connectivity: conn_vec[canonical_idx],
        z_prevalence: zp,
        z_diversity: zd,
        z_connectivity: zc,
        sbs_raw,
        sbs_shifted: sbs_raw,
        provenance: ScoreProvenance {
            window: g.meta().window,
            prune: g.meta().prune,
            distance_transform: "inverse_weight",
            node_count: n,
            edge_count: g.edge_count(),
        },
    })
}

/// Subtract the per-(theme, slice) minimum across regions so exported
/// scores are nonnegative. Raw values stay untouched.
pub fn shift_scores(scores: &mut [SbsScore]) {
    let mut minima: BTreeMap<(ThemeId, SliceWindow), f64> = BTreeMap::new();
    for s in scores.iter() {
        minima
            .entry((s.theme_id, s.slice))
            .and_modify(|m| *m = m.min(s.sbs_raw))
            .or_insert(s.sbs_raw);
    }
    for s in scores.iter_mut() {
        s.sbs_shifted = s.sbs_raw - minima[&(s.theme_id, s.slice)];
    }
}

/// Descriptive statistics of shifted scores per theme across regions,
/// rendered as CSV with header `variable,obs,mean,std_dev,min,max` and
/// 3-decimal rounding. The standard deviation is the sample one.
pub fn sbs_table(scores: &[SbsScore]) -> Result<String, SbsError> {
    if scores.is_empty() {
        return Err(SbsError::EmptyTable);
    }
    let mut grouped: BTreeMap<ThemeId, Vec<f64>> = BTreeMap::new();
    for s in scores {
        grouped.entry(s.theme_id).or_default().push(s.sbs_shifted);
    }
    let mut out = String::from("variable,obs,mean,std_dev,min,max\n");
    for (theme, values) in grouped {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        out.push_str(&format!(
            "sbs_{theme},{n},{mean:.3},{sd:.3},{min:.3},{max:.3}\n"
        ));
    }
    Ok(out)
}
