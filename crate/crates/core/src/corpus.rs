//! Article ingestion, text normalization, tokenization, and passage splitting.
//!
//! Articles arrive as line-delimited JSON (one object per line). All text
//! handling downstream of this module works on the token streams produced
//! here, so the normalization pipeline is pinned: Unicode word segmentation,
//! lower-casing, punctuation and pure-number removal, stopword filtering.
//! Offsets are character offsets into the exact string that was tokenized.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;
use unicode_segmentation::UnicodeSegmentation;

/// Default English stopword list shipped with the crate. Used when no
/// stopword file is configured.
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid corpus filter: date_from {from} is after date_to {to}")]
    InvalidFilter { from: NaiveDate, to: NaiveDate },
}

/// One news document as ingested from disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub id: String,
    /// Source domain name, e.g. `nytimes.com`.
    pub source: String,
    pub published_at: NaiveDate,
    pub title: String,
    pub body: String,
    /// Language tag as provided by the collector; trusted, not detected.
    pub language: String,
    /// Pre-filter marker: the source ranked in the top traffic percentile.
    pub top_traffic: bool,
}

impl Article {
    /// The exact string tokenized for scoring purposes: title and body
    /// concatenated with a newline when `include_title` is set, otherwise
    /// the body alone. Offsets in a [`TokenStream`] index into this string.
    pub fn text(&self, include_title: bool) -> String {
        if include_title && !self.title.is_empty() {
            format!("{}\n{}", self.title, self.body)
        } else {
            self.body.clone()
        }
    }
}

/// A normalized word token with its character span in the source string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    /// Character (not byte) offset of the first character.
    pub start: usize,
    /// Character offset one past the last character.
    pub end: usize,
}

/// Ordered normalized tokens for one article.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    pub article_id: String,
    pub tokens: Vec<Token>,
}

impl TokenStream {
    /// Token texts in order, without spans.
    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.text.as_str())
    }
}

/// Predicates applied while loading a corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusFilter {
    pub date_from: NaiveDate,
    pub date_to: NaiveDate,
    pub require_top_traffic: bool,
    /// Keep only articles with this language tag; `None` keeps all.
    pub language: Option<String>,
}

impl CorpusFilter {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.date_from > self.date_to {
            return Err(CorpusError::InvalidFilter {
                from: self.date_from,
                to: self.date_to,
            });
        }
        Ok(())
    }

    pub fn matches(&self, a: &Article) -> bool {
        if a.published_at < self.date_from || a.published_at > self.date_to {
            return false;
        }
        if self.require_top_traffic && !a.top_traffic {
            return false;
        }
        if let Some(lang) = &self.language {
            if &a.language != lang {
                return false;
            }
        }
        true
    }
}

/// Why a corpus line was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RejectReason {
    /// The line is not a JSON object with the expected fields.
    Malformed(String),
    /// A required field is missing.
    MissingField(&'static str),
    /// `published_at` is not a valid ISO-8601 date.
    BadDate(String),
    /// `id` is empty.
    EmptyId,
    /// `id` already appeared on an earlier line.
    DuplicateId(String),
    /// Both title and body are empty.
    EmptyText,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Malformed(e) => write!(f, "malformed: {e}"),
            RejectReason::MissingField(name) => write!(f, "missing_field:{name}"),
            RejectReason::BadDate(v) => write!(f, "bad_date:{v}"),
            RejectReason::EmptyId => write!(f, "empty_id"),
            RejectReason::DuplicateId(id) => write!(f, "duplicate_id:{id}"),
            RejectReason::EmptyText => write!(f, "empty_text"),
        }
    }
}

/// One rejected input line: 1-based line number plus reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub line: usize,
    pub reason: RejectReason,
}

/// Result of loading a corpus file: retained articles in file order plus a
/// report of rejected lines.
#[derive(Debug, Clone, Default)]
pub struct CorpusLoad {
    pub articles: Vec<Article>,
    pub rejections: Vec<Rejection>,
}

#[derive(Debug, Deserialize)]
struct RawArticle {
    id: Option<String>,
    source: Option<String>,
    published_at: Option<String>,
    title: Option<String>,
    body: Option<String>,
    language: Option<String>,
    top_traffic: Option<bool>,
}

/// Load a line-delimited JSON corpus, applying `filter`.
///
/// Malformed lines are rejected individually (never fatal); an unreadable
/// file is fatal. Retained articles keep file order. Empty lines are skipped.
pub fn load_corpus(path: &Path, filter: &CorpusFilter) -> Result<CorpusLoad, CorpusError> {
    filter.validate()?;
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut load = CorpusLoad::default();
    let mut seen_ids: HashSet<String> = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(&line, &mut seen_ids) {
            Ok(article) => {
                if filter.matches(&article) {
                    load.articles.push(article);
                }
            }
            Err(reason) => load.rejections.push(Rejection {
                line: line_no,
                reason,
            }),
        }
    }
    Ok(load)
}

fn parse_line(line: &str, seen_ids: &mut HashSet<String>) -> Result<Article, RejectReason> {
    let raw: RawArticle =
        serde_json::from_str(line).map_err(|e| RejectReason::Malformed(e.to_string()))?;
    let id = raw.id.ok_or(RejectReason::MissingField("id"))?;
    if id.is_empty() {
        return Err(RejectReason::EmptyId);
    }
    let source = raw.source.ok_or(RejectReason::MissingField("source"))?;
    let date_str = raw
        .published_at
        .ok_or(RejectReason::MissingField("published_at"))?;
    let published_at = NaiveDate::parse_from_str(&date_str, "%Y-%m-%d")
        .map_err(|_| RejectReason::BadDate(date_str.clone()))?;
    let title = raw.title.ok_or(RejectReason::MissingField("title"))?;
    let body = raw.body.ok_or(RejectReason::MissingField("body"))?;
    if body.is_empty() && title.is_empty() {
        return Err(RejectReason::EmptyText);
    }
    let language = raw.language.ok_or(RejectReason::MissingField("language"))?;
    let top_traffic = raw
        .top_traffic
        .ok_or(RejectReason::MissingField("top_traffic"))?;
    if !seen_ids.insert(id.clone()) {
        return Err(RejectReason::DuplicateId(id));
    }
    Ok(Article {
        id,
        source,
        published_at,
        title,
        body,
        language,
        top_traffic,
    })
}

/// Lower-cased stopword set.
#[derive(Debug, Clone, Default)]
pub struct StopwordSet {
    words: HashSet<String>,
}

impl StopwordSet {
    pub fn new<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        Self {
            words: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    /// An empty set (nothing filtered).
    pub fn empty() -> Self {
        Self::default()
    }

    /// The bundled English list.
    pub fn default_english() -> Self {
        Self::new(DEFAULT_STOPWORDS.lines())
    }

    /// Load from a UTF-8 file, one token per line.
    pub fn from_file(path: &Path) -> Result<Self, CorpusError> {
        let content = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Self::new(content.lines()))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// True if the token is a pure number: at least one digit and nothing but
/// digits and `.`/`,` separators (e.g. `100`, `3.5`, `167,746`).
pub fn is_pure_number(token: &str) -> bool {
    let mut saw_digit = false;
    for c in token.chars() {
        if c.is_numeric() {
            saw_digit = true;
        } else if c != '.' && c != ',' {
            return false;
        }
    }
    saw_digit
}

/// Strip combining diacritical marks: `Fès` → `Fes`, `Kénitra` → `Kenitra`.
/// Decomposes to NFD and drops the combining-mark block.
pub fn fold_diacritics(s: &str) -> String {
    s.nfd()
        .filter(|c| !('\u{0300}'..='\u{036f}').contains(c))
        .collect()
}

/// Segment `text` into lower-cased word tokens with character spans.
///
/// Every Unicode word (UAX #29) is kept, including numbers and stopwords;
/// use [`tokenize_text`] for the filtered stream.
pub fn segment_words(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut char_pos = 0usize;
    for (_, segment) in text.split_word_bound_indices() {
        let len = segment.chars().count();
        if segment.chars().any(|c| c.is_alphanumeric()) {
            // Segmentation can glue whitespace to combining marks; keep the
            // token free of whitespace and span only the kept characters.
            let mut first = None;
            let mut last = 0usize;
            let mut cleaned = String::with_capacity(segment.len());
            for (i, c) in segment.chars().enumerate() {
                if !c.is_whitespace() {
                    first.get_or_insert(i);
                    last = i;
                    cleaned.push(c);
                }
            }
            if let Some(first) = first {
                tokens.push(Token {
                    text: cleaned.to_lowercase(),
                    start: char_pos + first,
                    end: char_pos + last + 1,
                });
            }
        }
        char_pos += len;
    }
    tokens
}

/// Normalized, filtered token sequence: lower-cased Unicode words with
/// stopwords and pure-number tokens removed. Deterministic for fixed input.
pub fn tokenize_text(text: &str, stopwords: &StopwordSet) -> Vec<Token> {
    segment_words(text)
        .into_iter()
        .filter(|t| !is_pure_number(&t.text) && !stopwords.contains(&t.text))
        .collect()
}

/// Tokenize an article into the stream used for graph and relevance work.
///
/// The source string is [`Article::text`] with the given title handling;
/// offsets index into that string.
pub fn tokenize(a: &Article, stopwords: &StopwordSet, include_title: bool) -> TokenStream {
    TokenStream {
        article_id: a.id.clone(),
        tokens: tokenize_text(&a.text(include_title), stopwords),
    }
}

/// A contiguous chunk of an article body: normalized tokens plus the
/// character span it covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Passage {
    pub article_id: String,
    /// Ordinal within the article, 0-based.
    pub index: usize,
    pub tokens: Vec<Token>,
    /// Character span into the article body. Passage spans tile the body.
    pub span: (usize, usize),
}

/// Words that do not end a sentence when followed by a period.
const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "rev", "gen", "sen", "rep", "st", "jr", "sr", "vs", "etc",
    "inc", "ltd", "co", "corp", "no", "fig", "al", "e.g", "i.e", "u.s", "u.k", "u.n",
];

/// Split a body into sentence character spans.
///
/// A boundary is a run of `.`/`!`/`?` (plus closing quotes or brackets)
/// followed by whitespace and an upper-case letter, except after a known
/// abbreviation. Spans tile the input: each span ends where the next begins.
fn sentence_spans(body: &str) -> Vec<(usize, usize)> {
    let chars: Vec<char> = body.chars().collect();
    let n = chars.len();
    if n == 0 {
        return Vec::new();
    }
    let mut spans = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < n {
        if matches!(chars[i], '.' | '!' | '?') {
            let punct_start = i;
            while i < n && matches!(chars[i], '.' | '!' | '?') {
                i += 1;
            }
            while i < n && matches!(chars[i], '"' | '\'' | '\u{201d}' | '\u{2019}' | ')' | ']') {
                i += 1;
            }
            let mut j = i;
            while j < n && chars[j].is_whitespace() {
                j += 1;
            }
            let boundary = j < n
                && j > i
                && chars[j].is_uppercase()
                && !is_abbreviation(&chars[..punct_start]);
            if boundary {
                spans.push((start, j));
                start = j;
                i = j;
            }
        } else {
            i += 1;
        }
    }
    if start < n {
        spans.push((start, n));
    }
    spans
}

/// Check whether the word ending at `prefix`'s end is a known abbreviation.
fn is_abbreviation(prefix: &[char]) -> bool {
    let mut word: Vec<char> = Vec::new();
    for &c in prefix.iter().rev() {
        if c.is_whitespace() {
            break;
        }
        word.push(c);
    }
    word.reverse();
    let word: String = word
        .into_iter()
        .collect::<String>()
        .trim_matches(|c: char| !c.is_alphanumeric() && c != '.')
        .trim_end_matches('.')
        .to_lowercase();
    ABBREVIATIONS.contains(&word.as_str())
}

/// Split an article body into passages of at most `max_tokens` normalized
/// tokens, packing whole sentences greedily. A sentence longer than
/// `max_tokens` becomes standalone chunks hard-split at token boundaries.
/// Passage spans tile the body: no overlap, no gap.
///
/// `max_tokens` must be at least 16.
pub fn split_passages(a: &Article, max_tokens: usize, stopwords: &StopwordSet) -> Vec<Passage> {
    assert!(max_tokens >= 16, "max_tokens must be >= 16, got {max_tokens}");
    let spans = sentence_spans(&a.body);
    if spans.is_empty() {
        return Vec::new();
    }
    let body_tokens = tokenize_text(&a.body, stopwords);

    // Tokens per sentence, assigned by token start offset.
    let mut sentence_tokens: Vec<Vec<Token>> = vec![Vec::new(); spans.len()];
    let mut si = 0usize;
    for tok in body_tokens {
        while si + 1 < spans.len() && tok.start >= spans[si].1 {
            si += 1;
        }
        sentence_tokens[si].push(tok);
    }

    fn flush(
        passages: &mut Vec<Passage>,
        article_id: &str,
        tokens: &mut Vec<Token>,
        start: &mut Option<usize>,
        end: usize,
    ) {
        if let Some(s) = start.take() {
            passages.push(Passage {
                article_id: article_id.to_string(),
                index: 0, // re-numbered below
                tokens: std::mem::take(tokens),
                span: (s, end),
            });
        }
    }

    let mut passages: Vec<Passage> = Vec::new();
    let mut cur_tokens: Vec<Token> = Vec::new();
    let mut cur_start: Option<usize> = None;

    for (sent_idx, &(s_start, s_end)) in spans.iter().enumerate() {
        let toks = &sentence_tokens[sent_idx];
        if toks.len() > max_tokens {
            // Oversized sentence: close the open passage, then hard-split.
            flush(&mut passages, &a.id, &mut cur_tokens, &mut cur_start, s_start);
            let mut chunk_start = s_start;
            let mut k = 0usize;
            while k < toks.len() {
                let chunk = &toks[k..(k + max_tokens).min(toks.len())];
                let next_k = k + chunk.len();
                let chunk_end = if next_k < toks.len() {
                    toks[next_k].start
                } else {
                    s_end
                };
                passages.push(Passage {
                    article_id: a.id.clone(),
                    index: 0,
                    tokens: chunk.to_vec(),
                    span: (chunk_start, chunk_end),
                });
                chunk_start = chunk_end;
                k = next_k;
            }
            continue;
        }
        if cur_start.is_some() && cur_tokens.len() + toks.len() > max_tokens {
            flush(&mut passages, &a.id, &mut cur_tokens, &mut cur_start, s_start);
        }
        if cur_start.is_none() {
            cur_start = Some(s_start);
        }
        cur_tokens.extend(toks.iter().cloned());
        if sent_idx == spans.len() - 1 {
            flush(&mut passages, &a.id, &mut cur_tokens, &mut cur_start, s_end);
        }
    }

    for (i, p) in passages.iter_mut().enumerate() {
        p.index = i;
    }
    passages
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn article(id: &str, body: &str) -> Article {
        Article {
            id: id.into(),
            source: "example.com".into(),
            published_at: NaiveDate::from_ymd_opt(2016, 6, 1).unwrap(),
            title: String::new(),
            body: body.into(),
            language: "eng".into(),
            top_traffic: true,
        }
    }

    fn filter_2014_2019() -> CorpusFilter {
        CorpusFilter {
            date_from: NaiveDate::from_ymd_opt(2014, 1, 1).unwrap(),
            date_to: NaiveDate::from_ymd_opt(2019, 12, 31).unwrap(),
            require_top_traffic: false,
            language: None,
        }
    }

    fn write_lines(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        f
    }

    const VALID_LINE: &str = r#"{"id":"a1","source":"x.com","published_at":"2015-03-02","title":"T","body":"B.","language":"eng","top_traffic":true}"#;

    #[test]
    fn load_passes_valid_lines_through() {
        let f = write_lines(&[
            VALID_LINE,
            &VALID_LINE.replace("a1", "a2"),
            &VALID_LINE.replace("a1", "a3"),
        ]);
        let load = load_corpus(f.path(), &filter_2014_2019()).unwrap();
        assert_eq!(load.articles.len(), 3);
        assert!(load.rejections.is_empty());
        let ids: Vec<&str> = load.articles.iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, ["a1", "a2", "a3"]);
    }

    #[test]
    fn load_excludes_out_of_window_dates() {
        let f = write_lines(&[&VALID_LINE.replace("2015-03-02", "2013-05-01")]);
        let load = load_corpus(f.path(), &filter_2014_2019()).unwrap();
        assert!(load.articles.is_empty());
        assert!(load.rejections.is_empty());
    }

    #[test]
    fn load_rejects_missing_body() {
        let line = r#"{"id":"a1","source":"x.com","published_at":"2015-03-02","title":"T","language":"eng","top_traffic":true}"#;
        let f = write_lines(&[line]);
        let load = load_corpus(f.path(), &filter_2014_2019()).unwrap();
        assert!(load.articles.is_empty());
        assert_eq!(load.rejections.len(), 1);
        assert_eq!(load.rejections[0].line, 1);
        assert_eq!(load.rejections[0].reason, RejectReason::MissingField("body"));
    }

    #[test]
    fn load_rejects_duplicate_ids_and_bad_dates() {
        let f = write_lines(&[
            VALID_LINE,
            VALID_LINE,
            &VALID_LINE.replace("2015-03-02", "not-a-date"),
            "{ this is not json",
        ]);
        let load = load_corpus(f.path(), &filter_2014_2019()).unwrap();
        assert_eq!(load.articles.len(), 1);
        assert_eq!(load.rejections.len(), 3);
        assert_eq!(
            load.rejections[0].reason,
            RejectReason::DuplicateId("a1".into())
        );
    }

    #[test]
    fn load_missing_file_is_fatal() {
        let err = load_corpus(Path::new("/nonexistent/corpus.jsonl"), &filter_2014_2019());
        assert!(matches!(err, Err(CorpusError::Io { .. })));
    }

    #[test]
    fn filter_rejects_inverted_dates() {
        let mut f = filter_2014_2019();
        f.date_from = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        assert!(matches!(f.validate(), Err(CorpusError::InvalidFilter { .. })));
    }

    #[test]
    fn tokenize_folds_case_and_punctuation() {
        let a = article("a1", "Trade, trade and TRADE!");
        let stops = StopwordSet::new(["and"]);
        let ts = tokenize(&a, &stops, true);
        let texts: Vec<&str> = ts.texts().collect();
        assert_eq!(texts, ["trade", "trade", "trade"]);
    }

    #[test]
    fn tokenize_empty_body_is_empty() {
        let a = article("a1", "");
        let ts = tokenize(&a, &StopwordSet::empty(), true);
        assert!(ts.tokens.is_empty());
    }

    #[test]
    fn tokenize_drops_pure_numbers() {
        let a = article("a1", "a $100 billion budget");
        let stops = StopwordSet::new(["a"]);
        let ts = tokenize(&a, &stops, true);
        let texts: Vec<&str> = ts.texts().collect();
        assert_eq!(texts, ["billion", "budget"]);
    }

    #[test]
    fn tokenize_offsets_index_source_text() {
        let a = Article {
            title: "Big News".into(),
            ..article("a1", "Fès is growing.")
        };
        let ts = tokenize(&a, &StopwordSet::new(["is"]), true);
        let text: Vec<char> = a.text(true).chars().collect();
        for tok in &ts.tokens {
            let surface: String = text[tok.start..tok.end].iter().collect();
            assert_eq!(surface.to_lowercase(), tok.text);
        }
    }

    #[test]
    fn diacritics_fold_to_ascii() {
        assert_eq!(fold_diacritics("Fès"), "Fes");
        assert_eq!(fold_diacritics("Kénitra"), "Kenitra");
        assert_eq!(fold_diacritics("fes"), "fes");
    }

    #[test]
    fn pure_number_detection() {
        assert!(is_pure_number("100"));
        assert!(is_pure_number("167,746"));
        assert!(is_pure_number("3.5"));
        assert!(!is_pure_number("b2b"));
        assert!(!is_pure_number("..."));
    }

    fn sentence(words: usize, word: &str) -> String {
        let mut s = vec![word.to_string(); words].join(" ");
        s.push('.');
        s[0..1].make_ascii_uppercase();
        s
    }

    #[test]
    fn passages_pack_two_short_sentences() {
        let body = format!("{} {}", sentence(10, "alpha"), sentence(10, "beta"));
        let a = article("a1", &body);
        let ps = split_passages(&a, 32, &StopwordSet::empty());
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].tokens.len(), 20);
    }

    #[test]
    fn passages_split_when_over_budget() {
        let body = format!("{} {}", sentence(10, "alpha"), sentence(10, "beta"));
        let a = article("a1", &body);
        // max_tokens must be >= 16; 16 < 20 forces the split.
        let ps = split_passages(&a, 16, &StopwordSet::empty());
        assert_eq!(ps.len(), 2);
    }

    #[test]
    fn oversized_sentence_hard_splits() {
        let a = article("a1", &sentence(40, "word"));
        let ps = split_passages(&a, 16, &StopwordSet::empty());
        assert_eq!(ps.len(), 3);
        assert_eq!(
            ps.iter().map(|p| p.tokens.len()).collect::<Vec<_>>(),
            [16, 16, 8]
        );
    }

    #[test]
    fn passage_spans_tile_the_body() {
        let body = "Dr. Smith invests. The market reacted! Prices rose across the region. Then it settled.";
        let a = article("a1", body);
        let ps = split_passages(&a, 16, &StopwordSet::default_english());
        let total: usize = body.chars().count();
        assert_eq!(ps[0].span.0, 0);
        assert_eq!(ps.last().unwrap().span.1, total);
        for w in ps.windows(2) {
            assert_eq!(w[0].span.1, w[1].span.0);
        }
    }

    #[test]
    fn abbreviations_do_not_split() {
        let spans = sentence_spans("Mr. Smith met Dr. Jones. They agreed.");
        assert_eq!(spans.len(), 2);
    }

    #[test]
    fn normalization_is_idempotent() {
        let a = article("a1", "Fès-Meknès attracted $2.5 billion, officials said.");
        let stops = StopwordSet::default_english();
        let ts = tokenize(&a, &stops, false);
        let rendered = ts.texts().collect::<Vec<_>>().join(" ");
        let again = tokenize_text(&rendered, &stops);
        let first: Vec<&str> = ts.texts().collect();
        let second: Vec<&str> = again.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(first, second);
    }
}
