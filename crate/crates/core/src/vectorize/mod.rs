//! Text-to-vector stages: tokenization, TF-IDF, static word vectors and
//! precomputed contextual token embeddings.

mod frequency;
mod lexicon;
pub mod sidecar;
mod sparse;
mod tfidf;
mod tokenize;
mod tokens;

pub use frequency::FrequencyTable;
pub use lexicon::EmbeddingLexicon;
pub use sidecar::{load_sidecar_set, SidecarManifest, SidecarRecord, TokenEmbeddingsDoc};
pub use sparse::SparseVector;
pub use tfidf::{ngrams, TfidfModel, NGRAM_JOINER};
pub use tokenize::{token_strings, tokenize, Token};
pub use tokens::{token_vectors_for_span, TokenSequence};
