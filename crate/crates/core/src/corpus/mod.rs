//! Documents, character spans, the shared-task file formats and episode
//! sub-sampling.

mod document;
mod episodes;
mod span;
pub mod tsv;

pub use document::{Corpus, Document};
pub use episodes::{generate_episodes, EpisodeOptions, LabeledEpisode};
pub use span::{format_span_field, overlap_chars, parse_span_field, Interval, RangeConvention, SpanSet};
pub use tsv::{AnswerLine, ClauseAnnotation, QueryEpisode, Seed};
