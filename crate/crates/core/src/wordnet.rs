//! Weighted word co-occurrence graphs.
//!
//! One graph is built per (region, theme, time slice) from the passages that
//! survived relevance filtering. Nodes are tokens (theme keywords merged
//! into the theme's canonical token before counting), edges are undirected
//! and weighted by co-occurrence frequency within a sliding window. Windows
//! never cross passage boundaries.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Passage;
use crate::relevance::{ThemeId, ThemeQuery};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("co-occurrence window must be at least 2, got {0}")]
    WindowTooSmall(usize),
    #[error("cannot merge an empty graph list")]
    EmptyMerge,
    #[error("cannot merge graphs with mismatched metadata: {0}")]
    MetadataMismatch(String),
    #[error("failed to read or write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("invalid graph file {path}: {message}")]
    BadFile { path: String, message: String },
}

/// Time-slice granularity for graph construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    #[default]
    Pooled,
    Yearly,
    Quarterly,
    Monthly,
    Daily,
}

impl Granularity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Granularity::Pooled => "pooled",
            Granularity::Yearly => "yearly",
            Granularity::Quarterly => "quarterly",
            Granularity::Monthly => "monthly",
            Granularity::Daily => "daily",
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl std::str::FromStr for Granularity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pooled" => Ok(Granularity::Pooled),
            "yearly" => Ok(Granularity::Yearly),
            "quarterly" => Ok(Granularity::Quarterly),
            "monthly" => Ok(Granularity::Monthly),
            "daily" => Ok(Granularity::Daily),
            other => Err(format!("unknown granularity '{other}'")),
        }
    }
}

/// Inclusive date window of one slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SliceWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

/// The slice window containing `date` at a given granularity. `pooled_range`
/// bounds the pooled window (normally the corpus filter range).
pub fn window_containing(
    granularity: Granularity,
    date: NaiveDate,
    pooled_range: SliceWindow,
) -> SliceWindow {
    let (y, m, d) = (date.year(), date.month(), date.day());
    let ymd = |y, m, d| NaiveDate::from_ymd_opt(y, m, d).expect("valid date");
    match granularity {
        Granularity::Pooled => pooled_range,
        Granularity::Yearly => SliceWindow {
            start: ymd(y, 1, 1),
            end: ymd(y, 12, 31),
        },
        Granularity::Quarterly => {
            let q0 = (m - 1) / 3;
            let start_m = q0 * 3 + 1;
            let end_m = start_m + 2;
            SliceWindow {
                start: ymd(y, start_m, 1),
                end: last_day_of_month(y, end_m),
            }
        }
        Granularity::Monthly => SliceWindow {
            start: ymd(y, m, 1),
            end: last_day_of_month(y, m),
        },
        Granularity::Daily => SliceWindow {
            start: ymd(y, m, d),
            end: ymd(y, m, d),
        },
    }
}

fn last_day_of_month(y: i32, m: u32) -> NaiveDate {
    let (ny, nm) = if m == 12 { (y + 1, 1) } else { (y, m + 1) };
    NaiveDate::from_ymd_opt(ny, nm, 1)
        .expect("valid date")
        .pred_opt()
        .expect("valid date")
}

/// What to build a graph for: one region, one theme, one slicing scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub granularity: Granularity,
    pub region_id: String,
    pub theme_id: ThemeId,
}

/// Pruning knobs applied to a graph, recorded for provenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneParams {
    pub min_weight: u64,
    pub max_nodes: usize,
}

/// Graph identity and provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub region_id: String,
    pub theme_id: ThemeId,
    pub slice: SliceWindow,
    pub granularity: Granularity,
    pub window: usize,
    pub canonical_token: String,
    pub prune: Option<PruneParams>,
}

/// Weighted undirected word co-occurrence graph.
///
/// Tracks per-node occurrence counts alongside edges, so tokens that never
/// co-occur (single-token passages) still appear as isolated nodes.
#[derive(Debug, Clone)]
pub struct CooccurrenceGraph {
    meta: GraphMeta,
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    counts: Vec<u64>,
    adj: Vec<BTreeMap<usize, u64>>,
}

impl CooccurrenceGraph {
    fn new(meta: GraphMeta) -> Self {
        Self {
            meta,
            nodes: Vec::new(),
            index: HashMap::new(),
            counts: Vec::new(),
            adj: Vec::new(),
        }
    }

    pub fn meta(&self) -> &GraphMeta {
        &self.meta
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|n| n.len()).sum::<usize>() / 2
    }

    pub fn node_names(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Occurrence count of a token; 0 if absent.
    pub fn count(&self, token: &str) -> u64 {
        self.node_id(token).map_or(0, |i| self.counts[i])
    }

    pub fn count_by_id(&self, id: usize) -> u64 {
        self.counts[id]
    }

    /// Edge weight between two tokens; 0 if either is absent or unlinked.
    pub fn weight(&self, a: &str, b: &str) -> u64 {
        match (self.node_id(a), self.node_id(b)) {
            (Some(i), Some(j)) => self.adj[i].get(&j).copied().unwrap_or(0),
            _ => 0,
        }
    }

    /// Distinct-neighbor degree of a node.
    pub fn degree(&self, id: usize) -> usize {
        self.adj[id].len()
    }

    pub fn neighbors(&self, id: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.adj[id].iter().map(|(&j, &w)| (j, w))
    }

    fn intern(&mut self, token: &str) -> usize {
        if let Some(&i) = self.index.get(token) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(token.to_string());
        self.index.insert(token.to_string(), i);
        self.counts.push(0);
        self.adj.push(BTreeMap::new());
        i
    }

    fn add_edge(&mut self, i: usize, j: usize, w: u64) {
        debug_assert_ne!(i, j, "self-loops are never stored");
        *self.adj[i].entry(j).or_insert(0) += w;
        *self.adj[j].entry(i).or_insert(0) += w;
    }

    /// Edges as `(token_a, token_b, weight)` with `token_a < token_b`,
    /// sorted. This is the canonical serialized order.
    pub fn edge_list(&self) -> Vec<(String, String, u64)> {
        let mut edges = Vec::with_capacity(self.edge_count());
        for (i, nbrs) in self.adj.iter().enumerate() {
            for (&j, &w) in nbrs {
                if i < j {
                    let (a, b) = (&self.nodes[i], &self.nodes[j]);
                    let (a, b) = if a <= b { (a, b) } else { (b, a) };
                    edges.push((a.clone(), b.clone(), w));
                }
            }
        }
        edges.sort();
        edges
    }

    /// Node occurrence counts sorted by token.
    pub fn node_counts(&self) -> BTreeMap<String, u64> {
        self.nodes
            .iter()
            .cloned()
            .zip(self.counts.iter().copied())
            .collect()
    }

    pub fn total_edge_weight(&self) -> u64 {
        self.adj
            .iter()
            .map(|n| n.values().sum::<u64>())
            .sum::<u64>()
            / 2
    }

    /// Assemble a graph directly from node counts and weighted edges.
    /// Nodes referenced only by edges are created with count 0; self-loops
    /// and zero weights are rejected.
    pub fn from_parts(
        meta: GraphMeta,
        node_counts: &[(&str, u64)],
        edges: &[(&str, &str, u64)],
    ) -> Self {
        let mut g = CooccurrenceGraph::new(meta);
        for (token, count) in node_counts {
            let id = g.intern(token);
            g.counts[id] += count;
        }
        for (a, b, w) in edges {
            assert!(a != b, "self-loop {a}");
            assert!(*w > 0, "zero-weight edge {a}-{b}");
            let i = g.intern(a);
            let j = g.intern(b);
            g.add_edge(i, j, *w);
        }
        g
    }
}

impl PartialEq for CooccurrenceGraph {
    fn eq(&self, other: &Self) -> bool {
        self.meta == other.meta
            && self.node_counts() == other.node_counts()
            && self.edge_list() == other.edge_list()
    }
}

impl Eq for CooccurrenceGraph {}

/// Substitute theme keywords with the canonical token.
fn merged_tokens<'a>(passage: &'a Passage, theme: &'a ThemeQuery) -> Vec<&'a str> {
    passage
        .tokens
        .iter()
        .map(|t| {
            if theme.keywords.binary_search(&t.text).is_ok() {
                theme.canonical_token.as_str()
            } else {
                t.text.as_str()
            }
        })
        .collect()
}

/// Build the co-occurrence graph for one slice from theme-relevant passages.
///
/// Keywords are replaced by the theme's canonical token before counting.
/// For each position `i`, each distinct token within the following
/// `window - 1` positions co-occurs once with the token at `i`; the same
/// pair may accumulate again from later positions. Self-loops are dropped
/// and windows never span two passages.
pub fn build_graph(
    passages: &[Passage],
    window: usize,
    theme: &ThemeQuery,
    region_id: &str,
    slice: SliceWindow,
    granularity: Granularity,
) -> Result<CooccurrenceGraph, GraphError> {
    if window < 2 {
        return Err(GraphError::WindowTooSmall(window));
    }
    let meta = GraphMeta {
        region_id: region_id.to_string(),
        theme_id: theme.theme_id,
        slice,
        granularity,
        window,
        canonical_token: theme.canonical_token.clone(),
        prune: None,
    };
    let mut g = CooccurrenceGraph::new(meta);
    for passage in passages {
        let toks = merged_tokens(passage, theme);
        let ids: Vec<usize> = toks.iter().map(|t| g.intern(t)).collect();
        for &id in &ids {
            g.counts[id] += 1;
        }
        for i in 0..ids.len() {
            let mut seen: Vec<usize> = Vec::with_capacity(window - 1);
            for j in (i + 1)..(i + window).min(ids.len()) {
                let other = ids[j];
                if other == ids[i] || seen.contains(&other) {
                    continue;
                }
                seen.push(other);
                g.add_edge(ids[i], other, 1);
            }
        }
    }
    Ok(g)
}

/// Merge graphs by summing edge weights and node counts.
///
/// All inputs must share region, theme, window, and canonical token. Slices
/// must be identical unless `rollup` is set, in which case the result spans
/// the union of the input windows. Associative and commutative.
pub fn merge_graphs(
    graphs: &[CooccurrenceGraph],
    rollup: bool,
) -> Result<CooccurrenceGraph, GraphError> {
    let first = graphs.first().ok_or(GraphError::EmptyMerge)?;
    let mut meta = first.meta.clone();
    for g in &graphs[1..] {
        let m = &g.meta;
        if m.region_id != meta.region_id
            || m.theme_id != meta.theme_id
            || m.window != meta.window
            || m.canonical_token != meta.canonical_token
        {
            return Err(GraphError::MetadataMismatch(format!(
                "({}, {}, window {}) vs ({}, {}, window {})",
                meta.region_id, meta.theme_id, meta.window, m.region_id, m.theme_id, m.window
            )));
        }
        if m.slice != meta.slice {
            if !rollup {
                return Err(GraphError::MetadataMismatch(format!(
                    "slice {:?} vs {:?} without rollup",
                    meta.slice, m.slice
                )));
            }
            meta.slice.start = meta.slice.start.min(m.slice.start);
            meta.slice.end = meta.slice.end.max(m.slice.end);
        }
    }
    meta.prune = None;
    let mut out = CooccurrenceGraph::new(meta);
    for g in graphs {
        for (token, i) in g.nodes.iter().zip(0..) {
            let id = out.intern(token);
            out.counts[id] += g.counts[i];
        }
        for (i, nbrs) in g.adj.iter().enumerate() {
            let oi = out.index[&g.nodes[i]];
            for (&j, &w) in nbrs {
                if i < j {
                    let oj = out.index[&g.nodes[j]];
                    out.add_edge(oi, oj, w);
                }
            }
        }
    }
    Ok(out)
}

/// Drop edges below `min_weight`; if more than `max_nodes` nodes remain,
/// keep the `max_nodes` highest-prevalence nodes (ties broken by keeping
/// the lexicographically smaller token). The theme's canonical token is
/// never pruned. `min_weight` must be at least 1.
pub fn prune_graph(
    g: &CooccurrenceGraph,
    min_weight: u64,
    max_nodes: usize,
) -> CooccurrenceGraph {
    assert!(min_weight >= 1, "min_weight must be >= 1");
    let mut keep: Vec<usize> = (0..g.node_count()).collect();
    if g.node_count() > max_nodes {
        // Highest prevalence first; lexicographically smaller token wins ties.
        keep.sort_by(|&a, &b| {
            g.counts[b]
                .cmp(&g.counts[a])
                .then_with(|| g.nodes[a].cmp(&g.nodes[b]))
        });
        let canonical = g.node_id(&g.meta.canonical_token);
        keep.truncate(max_nodes);
        if let Some(c) = canonical {
            if !keep.contains(&c) {
                keep.pop();
                keep.push(c);
            }
        }
        // Restore original interning order for deterministic output.
        keep.sort_unstable();
    }

    let mut meta = g.meta.clone();
    meta.prune = Some(PruneParams {
        min_weight,
        max_nodes,
    });
    let mut out = CooccurrenceGraph::new(meta);
    let mut remap: HashMap<usize, usize> = HashMap::with_capacity(keep.len());
    for &old in &keep {
        let id = out.intern(&g.nodes[old]);
        out.counts[id] = g.counts[old];
        remap.insert(old, id);
    }
    for &old_i in &keep {
        for (&old_j, &w) in &g.adj[old_i] {
            if old_i < old_j && w >= min_weight {
                if let Some(&nj) = remap.get(&old_j) {
                    out.add_edge(remap[&old_i], nj, w);
                }
            }
        }
    }
    out
}

/// Sidecar metadata serialized next to the edge CSV. Together the two files
/// reconstruct the graph exactly.
#[derive(Debug, Serialize, Deserialize)]
struct GraphSidecar {
    meta: GraphMeta,
    node_counts: BTreeMap<String, u64>,
}

/// Write the graph as a CSV edge list plus a JSON sidecar.
pub fn save_graph(g: &CooccurrenceGraph, csv_path: &Path, sidecar_path: &Path) -> Result<(), GraphError> {
    let io_err = |path: &Path, source: std::io::Error| GraphError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut w = csv::Writer::from_path(csv_path).map_err(|e| GraphError::Csv {
        path: csv_path.display().to_string(),
        source: e,
    })?;
    w.write_record(["token_a", "token_b", "weight"])
        .map_err(|e| GraphError::Csv {
            path: csv_path.display().to_string(),
            source: e,
        })?;
    for (a, b, weight) in g.edge_list() {
        w.write_record([a.as_str(), b.as_str(), &weight.to_string()])
            .map_err(|e| GraphError::Csv {
                path: csv_path.display().to_string(),
                source: e,
            })?;
    }
    w.flush().map_err(|e| io_err(csv_path, e))?;

    let sidecar = GraphSidecar {
        meta: g.meta.clone(),
        node_counts: g.node_counts(),
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    std::fs::write(sidecar_path, json + "\n").map_err(|e| io_err(sidecar_path, e))?;
    Ok(())
}

/// Reconstruct a graph from its CSV edge list and JSON sidecar.
pub fn load_graph(csv_path: &Path, sidecar_path: &Path) -> Result<CooccurrenceGraph, GraphError> {
    let content = std::fs::read_to_string(sidecar_path).map_err(|source| GraphError::Io {
        path: sidecar_path.display().to_string(),
        source,
    })?;
    let sidecar: GraphSidecar =
        serde_json::from_str(&content).map_err(|e| GraphError::BadFile {
            path: sidecar_path.display().to_string(),
            message: e.to_string(),
        })?;
    let mut g = CooccurrenceGraph::new(sidecar.meta);
    for (token, count) in &sidecar.node_counts {
        let id = g.intern(token);
        g.counts[id] = *count;
    }
    let mut reader = csv::Reader::from_path(csv_path).map_err(|e| GraphError::Csv {
        path: csv_path.display().to_string(),
        source: e,
    })?;
    for row in reader.deserialize::<(String, String, u64)>() {
        let (a, b, w) = row.map_err(|e| GraphError::Csv {
            path: csv_path.display().to_string(),
            source: e,
        })?;
        let (Some(i), Some(j)) = (g.node_id(&a), g.node_id(&b)) else {
            return Err(GraphError::BadFile {
                path: csv_path.display().to_string(),
                message: format!("edge {a}-{b} references a token missing from the sidecar"),
            });
        };
        g.add_edge(i, j, w);
    }
    Ok(g)
}
