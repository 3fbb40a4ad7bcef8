//! Pipeline configuration: one declarative TOML file.
//!
//! Every tunable that changes results lives here (window, pruning,
//! relevance threshold, slicing, instrument variant, SE type), so a
//! sensitivity run is a config diff.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use regionscore::econ::{InstrumentVariant, SeType};
use regionscore::gazetteer::AmbiguousPolicy;
use regionscore::relevance::ThemeId;
use regionscore::wordnet::Granularity;
use regionscore::{CorpusFilter, RegressionSpec};

use crate::error::PipelineError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Paths {
    pub corpus: PathBuf,
    pub gazetteer: PathBuf,
    pub themes: PathBuf,
    pub firms: PathBuf,
    /// Stopword file; empty or absent uses the bundled English list.
    #[serde(default)]
    pub stopwords: Option<PathBuf>,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TokenizerConfig {
    /// Concatenate the title with the body before tokenizing.
    pub include_title: bool,
    /// Token budget per passage.
    pub passage_max_tokens: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            include_title: true,
            passage_max_tokens: 64,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub date_from: String,
    pub date_to: String,
    pub require_top_traffic: bool,
    pub language: Option<String>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            date_from: "2014-01-01".into(),
            date_to: "2019-12-31".into(),
            require_top_traffic: false,
            language: None,
        }
    }
}

impl FilterConfig {
    pub fn to_filter(&self) -> Result<CorpusFilter, PipelineError> {
        let parse = |s: &str| {
            NaiveDate::parse_from_str(s, "%Y-%m-%d")
                .map_err(|_| PipelineError::Config(format!("invalid date '{s}' (want YYYY-MM-DD)")))
        };
        let filter = CorpusFilter {
            date_from: parse(&self.date_from)?,
            date_to: parse(&self.date_to)?,
            require_top_traffic: self.require_top_traffic,
            language: self.language.clone(),
        };
        filter
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        Ok(filter)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphConfig {
    pub window: usize,
    pub min_weight: u64,
    pub max_nodes: usize,
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            window: 7,
            min_weight: 2,
            max_nodes: 5000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RelevanceConfig {
    pub threshold: f64,
}

impl Default for RelevanceConfig {
    fn default() -> Self {
        Self { threshold: 0.15 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SlicingConfig {
    pub granularity: Granularity,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct GazetteerConfig {
    pub ambiguous: AmbiguousPolicy,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EconConfig {
    pub instrument_variant: InstrumentVariant,
    pub se_type: SeType,
    pub seed: u64,
}

impl Default for EconConfig {
    fn default() -> Self {
        Self {
            instrument_variant: InstrumentVariant::LeaveOut,
            se_type: SeType::Hc1,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub paths: Paths,
    #[serde(default)]
    pub tokenizer: TokenizerConfig,
    #[serde(default)]
    pub corpus_filter: FilterConfig,
    #[serde(default)]
    pub graph: GraphConfig,
    #[serde(default)]
    pub relevance: RelevanceConfig,
    #[serde(default)]
    pub slicing: SlicingConfig,
    #[serde(default)]
    pub gazetteer: GazetteerConfig,
    #[serde(default)]
    pub econ: EconConfig,
    /// Model suite; empty uses the bundled default roster.
    #[serde(default, rename = "regression")]
    pub regressions: Vec<RegressionSpec>,
}

fn default_version() -> u32 {
    CONFIG_VERSION
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let content = std::fs::read_to_string(path).map_err(|e| {
            PipelineError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut config: PipelineConfig = toml::from_str(&content)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        // Input paths are resolved relative to the config file.
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut config.paths.corpus,
            &mut config.paths.gazetteer,
            &mut config.paths.themes,
            &mut config.paths.firms,
            &mut config.paths.output,
        ] {
            if p.is_relative() {
                *p = base.join(&p);
            }
        }
        if let Some(sw) = &mut config.paths.stopwords {
            if sw.is_relative() {
                *sw = base.join(&sw);
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.version != CONFIG_VERSION {
            return Err(PipelineError::Config(format!(
                "config version {} unsupported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        for (label, p) in [
            ("corpus", &self.paths.corpus),
            ("gazetteer", &self.paths.gazetteer),
            ("themes", &self.paths.themes),
            ("firms", &self.paths.firms),
        ] {
            if !p.exists() {
                return Err(PipelineError::Config(format!(
                    "{label} path does not exist: {}",
                    p.display()
                )));
            }
        }
        if let Some(sw) = &self.paths.stopwords {
            if !sw.exists() {
                return Err(PipelineError::Config(format!(
                    "stopwords path does not exist: {}",
                    sw.display()
                )));
            }
        }
        if self.graph.window < 2 {
            return Err(PipelineError::Config(format!(
                "graph.window must be at least 2, got {}",
                self.graph.window
            )));
        }
        if self.graph.min_weight < 1 {
            return Err(PipelineError::Config("graph.min_weight must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.relevance.threshold) {
            return Err(PipelineError::Config(format!(
                "relevance.threshold must lie in [0, 1], got {}",
                self.relevance.threshold
            )));
        }
        if self.tokenizer.passage_max_tokens < 16 {
            return Err(PipelineError::Config(
                "tokenizer.passage_max_tokens must be at least 16".into(),
            ));
        }
        self.corpus_filter.to_filter()?;
        for spec in &self.regressions {
            spec.validate()
                .map_err(|e| PipelineError::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// The model suite to estimate: the configured list, or the bundled
    /// default roster grouped into two rendered tables.
    pub fn roster(&self) -> Vec<(String, Vec<RegressionSpec>)> {
        if !self.regressions.is_empty() {
            return vec![("models".to_string(), self.regressions.clone())];
        }
        default_roster()
    }
}

/// The bundled nine-model suite: five crime/corruption models (no score,
/// then justice and taxation scores interacted with each obstacle) and four
/// single-obstacle models interacting licensing, labor, and land scores.
pub fn default_roster() -> Vec<(String, Vec<RegressionSpec>)> {
    let dep = "foreign_ownership";
    let controls = [
        "age",
        "size_medium",
        "size_large",
        "agglomeration",
        "physical_infra",
        "financial_infra",
    ];
    let crime_corruption = ["crime_disorder", "corruption"];
    let t2 = vec![
        RegressionSpec::plain("Model 1", dep, &crime_corruption, &controls),
        RegressionSpec::interacted(
            "Model 2",
            dep,
            &crime_corruption,
            ThemeId::Justice,
            "corruption",
            &controls,
        ),
        RegressionSpec::interacted(
            "Model 3",
            dep,
            &crime_corruption,
            ThemeId::Justice,
            "crime_disorder",
            &controls,
        ),
        RegressionSpec::interacted(
            "Model 4",
            dep,
            &crime_corruption,
            ThemeId::Taxation,
            "crime_disorder",
            &controls,
        ),
        RegressionSpec::interacted(
            "Model 5",
            dep,
            &crime_corruption,
            ThemeId::Taxation,
            "corruption",
            &controls,
        ),
    ];
    let t3 = vec![
        RegressionSpec::interacted(
            "Model 1",
            dep,
            &["business_license"],
            ThemeId::Justice,
            "business_license",
            &controls,
        ),
        RegressionSpec::interacted(
            "Model 2",
            dep,
            &["business_license"],
            ThemeId::Trade,
            "business_license",
            &controls,
        ),
        RegressionSpec::interacted(
            "Model 3",
            dep,
            &["labor_regulation"],
            ThemeId::Labor,
            "labor_regulation",
            &controls,
        ),
        RegressionSpec::interacted(
            "Model 4",
            dep,
            &["access_to_land"],
            ThemeId::Land,
            "access_to_land",
            &controls,
        ),
    ];
    vec![
        ("corruption_crime".to_string(), t2),
        ("license_labor_land".to_string(), t3),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_roster_has_nine_models() {
        let roster = default_roster();
        let total: usize = roster.iter().map(|(_, specs)| specs.len()).sum();
        assert_eq!(total, 9);
        for (_, specs) in &roster {
            for s in specs {
                s.validate().unwrap();
            }
        }
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["c.jsonl", "g.csv", "t.json", "f.csv"] {
            std::fs::write(dir.path().join(name), "x").unwrap();
        }
        let toml_text = format!(
            r#"
[paths]
corpus = "c.jsonl"
gazetteer = "g.csv"
themes = "t.json"
firms = "f.csv"
output = "out"
"#
        );
        let cfg_path = dir.path().join("config.toml");
        std::fs::write(&cfg_path, toml_text).unwrap();
        let cfg = PipelineConfig::load(&cfg_path).unwrap();
        assert_eq!(cfg.graph.window, 7);
        assert_eq!(cfg.graph.min_weight, 2);
        assert_eq!(cfg.graph.max_nodes, 5000);
        assert_eq!(cfg.relevance.threshold, 0.15);
        assert!(cfg.tokenizer.include_title);
        assert_eq!(cfg.roster().len(), 2);
    }

    #[test]
    fn bad_threshold_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["c.jsonl", "g.csv", "t.json", "f.csv"] {
            std::fs::write(dir.path().join(name), "x").unwrap();
        }
        let toml_text = r#"
[paths]
corpus = "c.jsonl"
gazetteer = "g.csv"
themes = "t.json"
firms = "f.csv"
output = "out"

[relevance]
threshold = 1.5
"#;
        let cfg_path = dir.path().join("config.toml");
        std::fs::write(&cfg_path, toml_text).unwrap();
        assert!(matches!(
            PipelineConfig::load(&cfg_path),
            Err(PipelineError::Config(_))
        ));
    }

    #[test]
    fn missing_input_path_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let toml_text = r#"
[paths]
corpus = "missing.jsonl"
gazetteer = "g.csv"
themes = "t.json"
firms = "f.csv"
output = "out"
"#;
        let cfg_path = dir.path().join("config.toml");
        std::fs::write(&cfg_path, toml_text).unwrap();
        assert!(matches!(
            PipelineConfig::load(&cfg_path),
            Err(PipelineError::Config(_))
        ));
    }
}
