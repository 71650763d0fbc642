use std::collections::HashMap;

use super::span::Interval;
use crate::error::{Error, Result};

/// A plain-text document. Positions are Unicode scalar value indices.
#[derive(Debug, Clone)]
pub struct Document {
    id: String,
    text: String,
    // Byte offset of every char, plus one trailing entry at text.len().
    char_bytes: Vec<usize>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let mut char_bytes: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        char_bytes.push(text.len());
        Document {
            id: id.into(),
            text,
            char_bytes,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Length in characters.
    pub fn char_len(&self) -> usize {
        self.char_bytes.len() - 1
    }

    /// Text covered by `interval`, or `None` when it runs past the end.
    pub fn slice(&self, interval: Interval) -> Option<&str> {
        if interval.end > self.char_len() {
            return None;
        }
        let a = self.char_bytes[interval.start];
        let b = self.char_bytes[interval.end];
        Some(&self.text[a..b])
    }
}

/// An ordered document collection with unique ids.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    docs: Vec<Document>,
    index: HashMap<String, usize>,
}

impl Corpus {
    pub fn new() -> Self {
        Corpus::default()
    }

    pub fn from_documents(docs: impl IntoIterator<Item = Document>) -> Result<Self> {
        let mut corpus = Corpus::new();
        for doc in docs {
            corpus.push(doc)?;
        }
        Ok(corpus)
    }

    pub fn push(&mut self, doc: Document) -> Result<()> {
        if self.index.contains_key(doc.id()) {
            return Err(Error::Invalid(format!("duplicate document id {:?}", doc.id())));
        }
        self.index.insert(doc.id().to_string(), self.docs.len());
        self.docs.push(doc);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.index.get(id).map(|&i| &self.docs[i])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn documents(&self) -> &[Document] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}
