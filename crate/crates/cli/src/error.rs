//! Pipeline errors mapped onto process exit codes.

use thiserror::Error;

use regionscore::corpus::CorpusError;
use regionscore::econ::EconError;
use regionscore::gazetteer::GazetteerError;
use regionscore::relevance::RelevanceError;
use regionscore::sbs::SbsError;
use regionscore::wordnet::GraphError;

/// Exit codes: 0 success, 2 config error, 3 data error, 4 internal.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Data(_) => 3,
            PipelineError::Internal(_) => 4,
        }
    }

    pub fn with_stage(self, stage: &str) -> Self {
        match self {
            PipelineError::Config(m) => PipelineError::Config(format!("[{stage}] {m}")),
            PipelineError::Data(m) => PipelineError::Data(format!("[{stage}] {m}")),
            PipelineError::Internal(m) => PipelineError::Internal(format!("[{stage}] {m}")),
        }
    }
}

impl From<CorpusError> for PipelineError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::InvalidFilter { .. } => PipelineError::Config(e.to_string()),
            CorpusError::Io { .. } => PipelineError::Data(e.to_string()),
        }
    }
}

impl From<GazetteerError> for PipelineError {
    fn from(e: GazetteerError) -> Self {
        match e {
            GazetteerError::UnknownRegion(_) => PipelineError::Internal(e.to_string()),
            _ => PipelineError::Data(e.to_string()),
        }
    }
}

impl From<RelevanceError> for PipelineError {
    fn from(e: RelevanceError) -> Self {
        match e {
            RelevanceError::BadThreshold(_) => PipelineError::Config(e.to_string()),
            RelevanceError::BadTheme { .. } | RelevanceError::BadThemeFile { .. } => {
                PipelineError::Config(e.to_string())
            }
            RelevanceError::EmptyCorpus => PipelineError::Data(e.to_string()),
            RelevanceError::Io { .. } => PipelineError::Data(e.to_string()),
        }
    }
}

impl From<GraphError> for PipelineError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::WindowTooSmall(_) => PipelineError::Config(e.to_string()),
            GraphError::Io { .. } | GraphError::Csv { .. } | GraphError::BadFile { .. } => {
                PipelineError::Data(e.to_string())
            }
            GraphError::EmptyMerge | GraphError::MetadataMismatch(_) => {
                PipelineError::Internal(e.to_string())
            }
        }
    }
}

impl From<SbsError> for PipelineError {
    fn from(e: SbsError) -> Self {
        PipelineError::Internal(e.to_string())
    }
}

impl From<EconError> for PipelineError {
    fn from(e: EconError) -> Self {
        match e {
            EconError::BadSpec { .. } | EconError::UnknownField(_) => {
                PipelineError::Config(e.to_string())
            }
            EconError::Io { .. } | EconError::Csv { .. } | EconError::NoRows => {
                PipelineError::Data(e.to_string())
            }
            EconError::UnknownAnswer(_)
            | EconError::ZeroVariance(_)
            | EconError::TooFewRows(_)
            | EconError::RankDeficient(_)
            | EconError::UnderIdentified { .. }
            | EconError::GroupTooSmall(_) => PipelineError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for PipelineError {
    fn from(e: std::io::Error) -> Self {
        PipelineError::Data(e.to_string())
    }
}
