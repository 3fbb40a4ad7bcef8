//! Region dictionary and mention tagging.
//!
//! A gazetteer maps every surface form of a region (its name, capital,
//! major cities, spelling variants) to a region id. Tagging runs over token
//! sequences, case-insensitive and diacritic-folded, with longest match
//! winning. An alias shared by several regions is kept for all of them and
//! flagged ambiguous.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{fold_diacritics, segment_words, Article};

#[derive(Debug, Error)]
pub enum GazetteerError {
    #[error("failed to read {path}: {source}")]
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
    #[error("gazetteer schema violation at line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("unknown region id: {0}")]
    UnknownRegion(String),
}

/// One region with all of its known surface forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub region_id: String,
    pub country: String,
    pub canonical_name: String,
    /// Includes the canonical name. Never contains the empty string.
    pub aliases: BTreeSet<String>,
}

/// Where in the article an alias matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Title,
    Body,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Title => write!(f, "title"),
            Location::Body => write!(f, "body"),
        }
    }
}

/// One tagged region mention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionMention {
    pub article_id: String,
    pub region_id: String,
    /// The gazetteer alias that matched (its stored surface form).
    pub alias: String,
    pub location: Location,
    /// Character span of the matched tokens in the title or body.
    pub span: (usize, usize),
    /// True when the alias maps to more than one region.
    pub ambiguous: bool,
}

/// Whether ambiguous-alias mentions count toward subcorpus membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmbiguousPolicy {
    #[default]
    Drop,
    Keep,
}

impl std::str::FromStr for AmbiguousPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drop" => Ok(AmbiguousPolicy::Drop),
            "keep" => Ok(AmbiguousPolicy::Keep),
            other => Err(format!("expected 'drop' or 'keep', got '{other}'")),
        }
    }
}

/// Normalize an alias or article token for matching: lower-case word
/// segmentation plus diacritic folding.
fn normalize_alias(alias: &str) -> Vec<String> {
    segment_words(alias)
        .into_iter()
        .map(|t| fold_diacritics(&t.text))
        .collect()
}

/// Token-sequence lookup over normalized aliases. Immutable after build;
/// construction is independent of record order.
#[derive(Debug, Clone, Default)]
pub struct GazetteerIndex {
    /// Normalized token sequence → (region_id, stored alias surface),
    /// sorted by region id.
    entries: BTreeMap<Vec<String>, Vec<(String, String)>>,
    /// Longest alias length in tokens.
    max_len: usize,
    region_ids: BTreeSet<String>,
}

impl GazetteerIndex {
    pub fn build(records: &[RegionRecord]) -> Self {
        let mut entries: BTreeMap<Vec<String>, Vec<(String, String)>> = BTreeMap::new();
        let mut region_ids = BTreeSet::new();
        for rec in records {
            region_ids.insert(rec.region_id.clone());
            // BTreeSet iteration keeps alias insertion deterministic.
            for alias in &rec.aliases {
                let key = normalize_alias(alias);
                if key.is_empty() {
                    continue;
                }
                let slot = entries.entry(key).or_default();
                match slot.iter().position(|(rid, _)| rid == &rec.region_id) {
                    // Several surfaces of one region may normalize
                    // identically (Fès/Fes); keep the lexicographically
                    // smallest surface so rebuilds are order-independent.
                    Some(i) => {
                        if alias < &slot[i].1 {
                            slot[i].1 = alias.clone();
                        }
                    }
                    None => slot.push((rec.region_id.clone(), alias.clone())),
                }
            }
        }
        let mut max_len = 0;
        for (key, slot) in entries.iter_mut() {
            slot.sort();
            max_len = max_len.max(key.len());
        }
        Self {
            entries,
            max_len,
            region_ids,
        }
    }

    pub fn contains_region(&self, region_id: &str) -> bool {
        self.region_ids.contains(region_id)
    }

    pub fn region_ids(&self) -> impl Iterator<Item = &str> {
        self.region_ids.iter().map(|s| s.as_str())
    }

    /// Aliases mapping to more than one region, with their region ids.
    pub fn ambiguous_aliases(&self) -> BTreeMap<String, Vec<String>> {
        let mut out = BTreeMap::new();
        for (key, slot) in &self.entries {
            if slot.len() > 1 {
                out.insert(
                    key.join(" "),
                    slot.iter().map(|(rid, _)| rid.clone()).collect(),
                );
            }
        }
        out
    }
}

/// Load a gazetteer CSV with header `region_id,country,canonical_name,alias`
/// (one alias per row). The canonical name always joins the alias set.
/// Conflicting country or canonical name for one region id is fatal, as is
/// an empty alias.
pub fn load_gazetteer(path: &Path) -> Result<Vec<RegionRecord>, GazetteerError> {
    let mut reader = csv::Reader::from_path(path).map_err(|source| GazetteerError::Csv {
        path: path.display().to_string(),
        source,
    })?;

    #[derive(Debug, Deserialize)]
    struct Row {
        region_id: String,
        country: String,
        canonical_name: String,
        alias: String,
    }

    let mut order: Vec<String> = Vec::new();
    let mut by_id: BTreeMap<String, RegionRecord> = BTreeMap::new();
    for (idx, row) in reader.deserialize::<Row>().enumerate() {
        let line = idx + 2; // 1-based, after the header
        let row = row.map_err(|source| GazetteerError::Csv {
            path: path.display().to_string(),
            source,
        })?;
        if row.region_id.is_empty() {
            return Err(GazetteerError::Schema {
                line,
                message: "empty region_id".into(),
            });
        }
        if row.alias.is_empty() {
            return Err(GazetteerError::Schema {
                line,
                message: "empty alias".into(),
            });
        }
        if row.canonical_name.is_empty() {
            return Err(GazetteerError::Schema {
                line,
                message: "empty canonical_name".into(),
            });
        }
        match by_id.get_mut(&row.region_id) {
            Some(rec) => {
                if rec.country != row.country || rec.canonical_name != row.canonical_name {
                    return Err(GazetteerError::Schema {
                        line,
                        message: format!(
                            "region {} redefined with different country or canonical name",
                            row.region_id
                        ),
                    });
                }
                rec.aliases.insert(row.alias);
            }
            None => {
                let mut aliases = BTreeSet::new();
                aliases.insert(row.canonical_name.clone());
                aliases.insert(row.alias);
                order.push(row.region_id.clone());
                by_id.insert(
                    row.region_id.clone(),
                    RegionRecord {
                        region_id: row.region_id,
                        country: row.country,
                        canonical_name: row.canonical_name,
                        aliases,
                    },
                );
            }
        }
    }
    Ok(order
        .into_iter()
        .map(|id| by_id.remove(&id).expect("record present"))
        .collect())
}

/// Tag all region mentions in an article's title and body.
///
/// Matching is whole-token, longest-match-wins, case-insensitive, and
/// diacritic-folded. An ambiguous alias emits one mention per candidate
/// region, each marked ambiguous. Zero mentions is a valid result.
pub fn tag_regions(a: &Article, idx: &GazetteerIndex) -> Vec<RegionMention> {
    let mut mentions = Vec::new();
    scan(&a.id, &a.title, Location::Title, idx, &mut mentions);
    scan(&a.id, &a.body, Location::Body, idx, &mut mentions);
    mentions
}

fn scan(
    article_id: &str,
    text: &str,
    location: Location,
    idx: &GazetteerIndex,
    out: &mut Vec<RegionMention>,
) {
    if idx.max_len == 0 || text.is_empty() {
        return;
    }
    let tokens = segment_words(text);
    let folded: Vec<String> = tokens.iter().map(|t| fold_diacritics(&t.text)).collect();
    let mut i = 0usize;
    while i < tokens.len() {
        let mut advanced = false;
        let longest = idx.max_len.min(tokens.len() - i);
        for len in (1..=longest).rev() {
            if let Some(slot) = idx.entries.get(&folded[i..i + len]) {
                let ambiguous = slot.len() > 1;
                for (region_id, alias) in slot {
                    out.push(RegionMention {
                        article_id: article_id.to_string(),
                        region_id: region_id.clone(),
                        alias: alias.clone(),
                        location,
                        span: (tokens[i].start, tokens[i + len - 1].end),
                        ambiguous,
                    });
                }
                i += len;
                advanced = true;
                break;
            }
        }
        if !advanced {
            i += 1;
        }
    }
}

/// Articles with at least one qualifying mention of `region_id`, in input
/// order, each at most once. Ambiguous mentions qualify only under
/// [`AmbiguousPolicy::Keep`].
pub fn build_region_subcorpus(
    articles: &[Article],
    mentions: &[RegionMention],
    region_id: &str,
    idx: &GazetteerIndex,
    policy: AmbiguousPolicy,
) -> Result<Vec<Article>, GazetteerError> {
    if !idx.contains_region(region_id) {
        return Err(GazetteerError::UnknownRegion(region_id.to_string()));
    }
    let members: BTreeSet<&str> = mentions
        .iter()
        .filter(|m| m.region_id == region_id)
        .filter(|m| policy == AmbiguousPolicy::Keep || !m.ambiguous)
        .map(|m| m.article_id.as_str())
        .collect();
    Ok(articles
        .iter()
        .filter(|a| members.contains(a.id.as_str()))
        .cloned()
        .collect())
}
