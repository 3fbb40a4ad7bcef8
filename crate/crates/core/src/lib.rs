//! News-to-indicator analytics: build region-level theme importance scores
//! from raw news text and estimate how those scores moderate the effect of
//! firm-level business obstacles on foreign ownership.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`corpus`] ingests line-delimited news articles and produces
//!    normalized token streams and passages;
//! 2. [`gazetteer`] tags region mentions and carves per-region subcorpora;
//! 3. [`relevance`] keeps theme-relevant passages, [`wordnet`] turns them
//!    into word co-occurrence graphs, and [`sbs`] scores each theme's
//!    prevalence, diversity, and connectivity per region;
//! 4. [`econ`] joins the region scores onto firm survey rows and estimates
//!    fixed-effects 2SLS models with robust standard errors.

pub mod corpus;
pub mod econ;
pub mod gazetteer;
pub mod relevance;
pub mod sbs;
pub mod synthetic;
pub mod wordnet;

pub use corpus::{Article, CorpusFilter, Passage, StopwordSet, TokenStream};
pub use econ::{DerivedFirmRow, FirmRecord, RegressionResult, RegressionSpec};
pub use gazetteer::{GazetteerIndex, RegionMention, RegionRecord};
pub use relevance::{ThemeId, ThemeQuery, TfidfModel};
pub use sbs::SbsScore;
pub use wordnet::{CooccurrenceGraph, Granularity, SliceWindow};
