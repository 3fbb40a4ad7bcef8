//! Theme queries, TF-IDF vectors, and passage relevance scoring.
//!
//! Passages are kept for a theme only when they are close enough to the
//! theme's keyword query. Queries and passages live in the same sparse
//! TF-IDF space; similarity is the cosine of non-negative vectors, so all
//! scores fall in [0, 1].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{tokenize_text, Passage, StopwordSet, TokenStream};

#[derive(Debug, Error)]
pub enum RelevanceError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid theme file {path}: {message}")]
    BadThemeFile { path: String, message: String },
    #[error("invalid theme '{theme}': {message}")]
    BadTheme { theme: String, message: String },
    #[error("cannot build a TF-IDF model from an empty corpus")]
    EmptyCorpus,
    #[error("relevance threshold must lie in [0, 1], got {0}")]
    BadThreshold(f64),
}

/// The five macro themes scored per region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThemeId {
    Land,
    Labor,
    Trade,
    Taxation,
    Justice,
}

impl ThemeId {
    pub const ALL: [ThemeId; 5] = [
        ThemeId::Land,
        ThemeId::Labor,
        ThemeId::Trade,
        ThemeId::Taxation,
        ThemeId::Justice,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ThemeId::Land => "land",
            ThemeId::Labor => "labor",
            ThemeId::Trade => "trade",
            ThemeId::Taxation => "taxation",
            ThemeId::Justice => "justice",
        }
    }
}

impl fmt::Display for ThemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl std::str::FromStr for ThemeId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "land" => Ok(ThemeId::Land),
            "labor" => Ok(ThemeId::Labor),
            "trade" => Ok(ThemeId::Trade),
            "taxation" => Ok(ThemeId::Taxation),
            "justice" => Ok(ThemeId::Justice),
            other => Err(format!("unknown theme id '{other}'")),
        }
    }
}

/// A named theme: its keyword list and the canonical token that stands in
/// for every keyword in the co-occurrence graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThemeQuery {
    pub theme_id: ThemeId,
    /// Normalized single-token keywords, sorted and deduplicated.
    pub keywords: Vec<String>,
    pub canonical_token: String,
}

impl ThemeQuery {
    /// Validate and normalize a theme definition against the tokenizer.
    pub fn new(
        theme_id: ThemeId,
        keywords: &[String],
        canonical_token: &str,
        stopwords: &StopwordSet,
    ) -> Result<Self, RelevanceError> {
        let bad = |message: String| RelevanceError::BadTheme {
            theme: theme_id.to_string(),
            message,
        };
        if keywords.is_empty() {
            return Err(bad("keyword list is empty".into()));
        }
        let mut normalized = BTreeMap::new();
        for kw in keywords {
            let toks = tokenize_text(kw, stopwords);
            match toks.len() {
                1 => {
                    normalized.insert(toks[0].text.clone(), ());
                }
                0 => {
                    return Err(bad(format!(
                        "keyword '{kw}' normalizes to nothing (stopword or number?)"
                    )))
                }
                _ => {
                    return Err(bad(format!(
                        "keyword '{kw}' is not a single token; list each token separately"
                    )))
                }
            }
        }
        if canonical_token.is_empty() || canonical_token.chars().any(char::is_whitespace) {
            return Err(bad("canonical token must be a single non-empty token".into()));
        }
        if stopwords.contains(&canonical_token.to_lowercase()) {
            return Err(bad(format!(
                "canonical token '{canonical_token}' is a stopword"
            )));
        }
        Ok(Self {
            theme_id,
            keywords: normalized.into_keys().collect(),
            canonical_token: canonical_token.to_string(),
        })
    }
}

#[derive(Debug, Deserialize)]
struct RawTheme {
    theme_id: String,
    canonical_token: String,
    keywords: Vec<String>,
}

/// Load theme definitions from a JSON array of
/// `{theme_id, canonical_token, keywords}` objects.
pub fn load_themes(path: &Path, stopwords: &StopwordSet) -> Result<Vec<ThemeQuery>, RelevanceError> {
    let content = std::fs::read_to_string(path).map_err(|source| RelevanceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let raw: Vec<RawTheme> =
        serde_json::from_str(&content).map_err(|e| RelevanceError::BadThemeFile {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    let mut themes = Vec::with_capacity(raw.len());
    for r in raw {
        let theme_id: ThemeId = r.theme_id.parse().map_err(|e| RelevanceError::BadThemeFile {
            path: path.display().to_string(),
            message: e,
        })?;
        themes.push(ThemeQuery::new(
            theme_id,
            &r.keywords,
            &r.canonical_token,
            stopwords,
        )?);
    }
    Ok(themes)
}

/// Relevance of one passage to one theme. Cosine of non-negative vectors,
/// so always in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelevanceScore {
    pub article_id: String,
    pub passage_index: usize,
    pub theme_id: ThemeId,
    pub score: f64,
}

/// Sparse TF-IDF model over a corpus of token streams.
///
/// `idf(t) = ln((1 + N) / (1 + df(t))) + 1` with `N` documents. Document
/// vectors are `tf · idf`, L2-normalized. The vocabulary is sorted
/// lexicographically so term indices are deterministic.
#[derive(Debug, Clone)]
pub struct TfidfModel {
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    idf: Vec<f64>,
    n_docs: usize,
}

impl TfidfModel {
    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// IDF weight of a term; 0 for out-of-vocabulary terms.
    pub fn idf(&self, term: &str) -> f64 {
        self.index.get(term).map_or(0.0, |&i| self.idf[i])
    }

    /// Sparse L2-normalized TF-IDF vector of a bag of tokens, keyed by
    /// vocabulary index. All-unknown input yields an empty vector.
    pub fn vectorize<'a, I: IntoIterator<Item = &'a str>>(&self, tokens: I) -> BTreeMap<usize, f64> {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for tok in tokens {
            if let Some(&i) = self.index.get(tok) {
                *counts.entry(i).or_insert(0.0) += 1.0;
            }
        }
        let mut norm_sq = 0.0;
        for (&i, w) in counts.iter_mut() {
            *w *= self.idf[i];
            norm_sq += *w * *w;
        }
        if norm_sq > 0.0 {
            let norm = norm_sq.sqrt();
            for w in counts.values_mut() {
                *w /= norm;
            }
        }
        counts
    }
}

/// Build a TF-IDF model from corpus token streams.
///
/// At least one non-empty document is required.
pub fn build_tfidf_model(docs: &[TokenStream]) -> Result<TfidfModel, RelevanceError> {
    if docs.iter().all(|d| d.tokens.is_empty()) {
        return Err(RelevanceError::EmptyCorpus);
    }
    let n_docs = docs.len();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let mut seen: BTreeMap<&str, ()> = BTreeMap::new();
        for tok in doc.texts() {
            seen.entry(tok).or_insert(());
        }
        for term in seen.keys() {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let vocab: Vec<String> = df.keys().map(|s| s.to_string()).collect();
    let idf: Vec<f64> = df
        .values()
        .map(|&d| ((1.0 + n_docs as f64) / (1.0 + d as f64)).ln() + 1.0)
        .collect();
    let index = vocab
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(TfidfModel {
        vocab,
        index,
        idf,
        n_docs,
    })
}

fn cosine_sparse(a: &BTreeMap<usize, f64>, b: &BTreeMap<usize, f64>) -> f64 {
    // Both sides are already L2-normalized; the dot product is the cosine.
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .filter_map(|(i, wa)| large.get(i).map(|wb| wa * wb))
        .sum()
}

/// Cosine similarity between a theme query and one passage.
///
/// The query vector is the TF-IDF of the keyword multiset (each listed
/// keyword contributes count 1 per occurrence in the list).
pub fn score_passage(q: &ThemeQuery, p: &Passage, model: &TfidfModel) -> RelevanceScore {
    let qv = model.vectorize(q.keywords.iter().map(String::as_str));
    let pv = model.vectorize(p.tokens.iter().map(|t| t.text.as_str()));
    RelevanceScore {
        article_id: p.article_id.clone(),
        passage_index: p.index,
        theme_id: q.theme_id,
        score: cosine_sparse(&qv, &pv),
    }
}

/// Passages scoring at least `threshold` against the theme query, in the
/// original order.
pub fn filter_relevant(
    q: &ThemeQuery,
    passages: &[Passage],
    model: &TfidfModel,
    threshold: f64,
) -> Result<Vec<Passage>, RelevanceError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(RelevanceError::BadThreshold(threshold));
    }
    Ok(passages
        .iter()
        .filter(|p| score_passage(q, p, model).score >= threshold)
        .cloned()
        .collect())
}

/// Rank vocabulary terms by summed raw TF-IDF mass `Σ_d tf(t, d) · idf(t)`
/// across documents; ties break lexicographically. Returns at most `top_k`
/// terms with their mass.
pub fn suggest_keywords(docs: &[TokenStream], top_k: usize) -> Result<Vec<(String, f64)>, RelevanceError> {
    if top_k == 0 {
        return Ok(Vec::new());
    }
    let model = build_tfidf_model(docs)?;
    let mut mass: BTreeMap<&str, f64> = BTreeMap::new();
    for doc in docs {
        for tok in doc.texts() {
            *mass.entry(tok).or_insert(0.0) += model.idf(tok);
        }
    }
    let mut ranked: Vec<(String, f64)> = mass
        .into_iter()
        .map(|(t, m)| (t.to_string(), m))
        .collect();
    // Stable on the lexicographic pre-order, so equal masses stay sorted.
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    ranked.truncate(top_k);
    Ok(ranked)
}
