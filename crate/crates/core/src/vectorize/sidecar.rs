//! Precomputed contextual token embeddings.
//!
//! Per-document file layout, all integers and floats little-endian:
//!
//! ```text
//! "CDSC1"                      5 bytes
//! num_tokens                   u32
//! dim                          u32
//! num_tokens × (start, end)    u32 pairs, half-open character offsets
//! num_tokens × dim             f32, row-major
//! ```
//!
//! The manifest is a TSV with the header
//! `doc_id  path  num_tokens  dim  model  layer`; `path` is relative to the
//! manifest's directory.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::corpus::Interval;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const SIDECAR_MAGIC: &[u8; 5] = b"CDSC1";

const MANIFEST_HEADER: &str = "doc_id\tpath\tnum_tokens\tdim\tmodel\tlayer";

#[derive(Debug, Clone, PartialEq)]
pub struct TokenEmbeddingsDoc<T> {
    pub doc_id: String,
    offsets: Vec<Interval>,
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> TokenEmbeddingsDoc<T> {
    pub fn new(doc_id: impl Into<String>, offsets: Vec<Interval>, dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != offsets.len() * dim {
            return Err(Error::Invalid(format!(
                "embedding matrix has {} values, expected {} × {}",
                data.len(),
                offsets.len(),
                dim
            )));
        }
        if let Some(w) = offsets.windows(2).find(|w| w[0].start >= w[1].start) {
            return Err(Error::Invalid(format!(
                "token offsets not strictly increasing at start {}",
                w[1].start
            )));
        }
        Ok(TokenEmbeddingsDoc {
            doc_id: doc_id.into(),
            offsets,
            dim,
            data,
        })
    }

    pub fn num_tokens(&self) -> usize {
        self.offsets.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offsets(&self) -> &[Interval] {
        &self.offsets
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn encoded_len(num_tokens: usize, dim: usize) -> usize {
        5 + 8 + 8 * num_tokens + 4 * num_tokens * dim
    }

    pub fn from_bytes(doc_id: &str, bytes: &[u8]) -> Result<Self> {
        let bad = |msg: String| Error::Model(format!("sidecar for {doc_id:?}: {msg}"));
        if bytes.len() < 13 || &bytes[..5] != SIDECAR_MAGIC {
            return Err(bad("missing CDSC1 header".into()));
        }
        let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
        let t = u32_at(5);
        let d = u32_at(9);
        let want = Self::encoded_len(t, d);
        if bytes.len() != want {
            return Err(bad(format!("file is {} bytes, layout requires {want}", bytes.len())));
        }
        let mut offsets = Vec::with_capacity(t);
        for k in 0..t {
            let s = u32_at(13 + 8 * k);
            let e = u32_at(17 + 8 * k);
            if s > e {
                return Err(bad(format!("token {k} has start {s} after end {e}")));
            }
            offsets.push(Interval::new(s, e));
        }
        let base = 13 + 8 * t;
        let data = bytes[base..]
            .chunks_exact(4)
            .map(|c| T::widen_f32(f32::from_le_bytes(c.try_into().unwrap())))
            .collect();
        Self::new(doc_id, offsets, d, data).map_err(|e| bad(e.to_string()))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::encoded_len(self.num_tokens(), self.dim));
        out.extend_from_slice(SIDECAR_MAGIC);
        out.extend_from_slice(&(self.num_tokens() as u32).to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        for iv in &self.offsets {
            out.extend_from_slice(&(iv.start as u32).to_le_bytes());
            out.extend_from_slice(&(iv.end as u32).to_le_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.as_f32().to_le_bytes());
        }
        out
    }

    pub fn load(doc_id: &str, path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(doc_id, &bytes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidecarRecord {
    pub doc_id: String,
    pub path: PathBuf,
    pub num_tokens: usize,
    pub dim: usize,
    pub model: String,
    pub layer: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SidecarManifest {
    pub records: Vec<SidecarRecord>,
}

impl SidecarManifest {
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut records = Vec::new();
        let mut dim: Option<usize> = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line_no == 1 && line == MANIFEST_HEADER {
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 6 {
                return Err(Error::parse(source_name, line_no, format!("expected 6 fields, found {}", f.len())));
            }
            let num = |s: &str| -> Result<usize> {
                s.parse().map_err(|_| Error::parse(source_name, line_no, format!("bad integer {s:?}")))
            };
            let rec = SidecarRecord {
                doc_id: f[0].to_string(),
                path: PathBuf::from(f[1]),
                num_tokens: num(f[2])?,
                dim: num(f[3])?,
                model: f[4].to_string(),
                layer: f[5].to_string(),
            };
            match dim {
                Some(d) if d != rec.dim => {
                    return Err(Error::parse(source_name, line_no, format!("dim {} differs from {d}", rec.dim)));
                }
                _ => dim = Some(rec.dim),
            }
            if records.iter().any(|r: &SidecarRecord| r.doc_id == rec.doc_id) {
                return Err(Error::parse(source_name, line_no, format!("duplicate document {:?}", rec.doc_id)));
            }
            records.push(rec);
        }
        Ok(SidecarManifest { records })
    }

    pub fn render(&self) -> String {
        let mut out = format!("{MANIFEST_HEADER}\n");
        for r in &self.records {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.doc_id,
                r.path.display(),
                r.num_tokens,
                r.dim,
                r.model,
                r.layer
            )
            .unwrap();
        }
        out
    }

    pub fn dim(&self) -> Option<usize> {
        self.records.first().map(|r| r.dim)
    }
}

/// Reads a manifest and every document it lists, checking each file against
/// its record.
pub fn load_sidecar_set<T: Real>(manifest_path: &Path) -> Result<(SidecarManifest, HashMap<String, TokenEmbeddingsDoc<T>>)> {
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest = SidecarManifest::parse(&text, &manifest_path.display().to_string())?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut docs = HashMap::new();
    for rec in &manifest.records {
        let doc = TokenEmbeddingsDoc::load(&rec.doc_id, &base.join(&rec.path))?;
        if doc.num_tokens() != rec.num_tokens || doc.dim() != rec.dim {
            return Err(Error::Model(format!(
                "sidecar for {:?} is {}×{}, manifest says {}×{}",
                rec.doc_id,
                doc.num_tokens(),
                doc.dim(),
                rec.num_tokens,
                rec.dim
            )));
        }
        docs.insert(rec.doc_id.clone(), doc);
    }
    Ok((manifest, docs))
}
