//! Pipeline configuration, fitting, and episode answering.

mod config;
mod engine;
mod models;

pub use config::{
    parse_override, AggregatorConfig, AggregatorKind, ChooserConfig, ChooserKind, PipelineConfig, ProjectorConfig,
    ProjectorKind, ScorerConfig, ScorerKind, SegmenterConfig, VectorizerConfig, VectorizerKind, WmdMode,
};
pub use engine::{Encoding, Engine, Resources, ScoredCandidate};
pub use models::FittedModels;
