use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Static word vectors in the plain-text `token v1 v2 ... vd` format.
/// Tokens are case-folded on load to match the tokenizer.
#[derive(Debug, Clone)]
pub struct EmbeddingLexicon<T> {
    dim: usize,
    index: HashMap<String, usize>,
    tokens: Vec<String>,
    data: Vec<T>,
}

impl<T: Real> EmbeddingLexicon<T> {
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file), &path.display().to_string())
    }

    pub fn read<R: BufRead>(reader: R, source_name: &str) -> Result<Self> {
        let mut lex = EmbeddingLexicon {
            dim: 0,
            index: HashMap::new(),
            tokens: Vec::new(),
            data: Vec::new(),
        };
        let mut row: Vec<T> = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::parse(source_name, line_no, e.to_string()))?;
            let mut fields = line.split_whitespace();
            let Some(token) = fields.next() else {
                continue;
            };
            row.clear();
            for f in fields {
                let v: f64 = f.parse().map_err(|_| {
                    Error::parse(source_name, line_no, format!("non-numeric value {f:?}"))
                })?;
                row.push(T::cast(v));
            }
            if lex.tokens.is_empty() && lex.dim == 0 {
                if row.is_empty() {
                    return Err(Error::parse(source_name, line_no, "vector has no components"));
                }
                lex.dim = row.len();
            } else if row.len() != lex.dim {
                return Err(Error::parse(
                    source_name,
                    line_no,
                    format!("expected {} components, found {}", lex.dim, row.len()),
                ));
            }
            let key = token.to_lowercase();
            if lex.index.contains_key(&key) {
                warn!("{source_name}:{line_no}: duplicate token {key:?} ignored");
                continue;
            }
            lex.index.insert(key.clone(), lex.tokens.len());
            lex.tokens.push(key);
            lex.data.extend_from_slice(&row);
        }
        if lex.dim == 0 {
            return Err(Error::Invalid(format!("{source_name}: lexicon is empty")));
        }
        Ok(lex)
    }

    /// Writes the lexicon back in the text format.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, tok) in self.tokens.iter().enumerate() {
            write!(out, "{tok}")?;
            for v in self.row(i) {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, token: &str) -> Option<&[T]> {
        self.index.get(token).map(|&i| self.row(i))
    }
}
