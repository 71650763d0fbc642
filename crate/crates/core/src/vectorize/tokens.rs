use ndarray::Array2;

use super::lexicon::EmbeddingLexicon;
use super::sidecar::TokenEmbeddingsDoc;
use super::tokenize::tokenize;
use crate::corpus::{Document, Interval, SpanSet};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Token vectors of one document in document order, each with its source
/// offsets and a lookup key (the lowercased surface form).
#[derive(Debug, Clone)]
pub struct TokenSequence<T> {
    intervals: Vec<Interval>,
    keys: Vec<String>,
    dim: usize,
    data: Vec<T>,
    // running maximum of `intervals[..=i].end`
    max_end: Vec<usize>,
}

impl<T: Real> TokenSequence<T> {
    fn build(intervals: Vec<Interval>, keys: Vec<String>, dim: usize, data: Vec<T>) -> Self {
        let mut max_end = Vec::with_capacity(intervals.len());
        let mut m = 0;
        for iv in &intervals {
            m = m.max(iv.end);
            max_end.push(m);
        }
        TokenSequence {
            intervals,
            keys,
            dim,
            data,
            max_end,
        }
    }

    /// Tokenizes `doc` and keeps the tokens the lexicon knows.
    pub fn from_lexicon(doc: &Document, lexicon: &EmbeddingLexicon<T>) -> Self {
        let mut intervals = Vec::new();
        let mut keys = Vec::new();
        let mut data = Vec::new();
        for tok in tokenize(doc.text()) {
            if let Some(v) = lexicon.get(&tok.text) {
                intervals.push(tok.interval);
                data.extend_from_slice(v);
                keys.push(tok.text);
            }
        }
        Self::build(intervals, keys, lexicon.dim(), data)
    }

    /// Wraps precomputed contextual vectors. Offsets must lie inside `doc`.
    pub fn from_sidecar(doc: &Document, emb: &TokenEmbeddingsDoc<T>) -> Result<Self> {
        let mut keys = Vec::with_capacity(emb.num_tokens());
        for iv in emb.offsets() {
            let surface = doc.slice(*iv).ok_or_else(|| {
                Error::Model(format!(
                    "sidecar token {}-{} lies outside document {:?}",
                    iv.start,
                    iv.end,
                    doc.id()
                ))
            })?;
            keys.push(surface.trim().to_lowercase());
        }
        Ok(Self::build(emb.offsets().to_vec(), keys, emb.dim(), emb.data().to_vec()))
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Indices of tokens whose offsets intersect `interval`.
    pub fn tokens_in(&self, interval: Interval) -> std::ops::Range<usize> {
        let hi = self.intervals.partition_point(|t| t.start < interval.end);
        let lo = self.max_end[..hi].partition_point(|&e| e <= interval.start);
        lo..hi
    }

    /// Indices of tokens touching any interval of `span`, in document order
    /// and without repeats.
    pub fn token_indices(&self, span: &SpanSet) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for iv in span {
            for i in self.tokens_in(*iv) {
                if self.intervals[i].intersects(iv) && out.last().is_none_or(|&l| l < i) {
                    out.push(i);
                }
            }
        }
        out
    }

    /// Rows for `indices` as a matrix.
    pub fn matrix(&self, indices: &[usize]) -> Array2<T> {
        let mut m = Array2::zeros((indices.len(), self.dim));
        for (r, &i) in indices.iter().enumerate() {
            m.row_mut(r).assign(&ndarray::ArrayView1::from(self.row(i)));
        }
        m
    }
}

/// Ordered token matrix for the part of a document covered by `span`.
/// Empty when no token intersects the span.
pub fn token_vectors_for_span<T: Real>(tokens: &TokenSequence<T>, span: &SpanSet) -> Array2<T> {
    tokens.matrix(&tokens.token_indices(span))
}
