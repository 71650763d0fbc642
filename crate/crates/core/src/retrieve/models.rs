//! Binary model bundle.
//!
//! ```text
//! "CDMB"  u16 version  u32 artifact_count
//! artifact_count × (u64 byte_length, artifact)
//!
//! artifact: "CDPJ"  u16 version  u8 kind  payload
//!   kind 0  configuration   u32 len, UTF-8 text
//!   kind 1  tSVD            u32 r, u32 d, r × f32 singular values, r·d × f32 components
//!   kind 2  fICA            u32 n, u32 d, u8 converged, u32 iterations,
//!                           d × f32 mean, n·d × f32 whitening, n·n × f32 unmixing
//!   kind 3  common comp.    u32 d, d × f32
//!   kind 4  TF-IDF          u32 lo, u32 hi, u8 binary, u32 V,
//!                           V × (u32 len, UTF-8 term), V × f32 idf
//! ```
//!
//! Integers and floats are little-endian; matrices are row-major. Values are
//! stored as `f32`, so `f32` models round-trip bit-exactly.

use std::path::Path;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::transform::{CommonComponent, FicaProjector, Projector, TsvdProjector};
use crate::vectorize::TfidfModel;

const BUNDLE_MAGIC: &[u8; 4] = b"CDMB";
const ARTIFACT_MAGIC: &[u8; 4] = b"CDPJ";
const VERSION: u16 = 1;

const KIND_CONFIG: u8 = 0;
const KIND_TSVD: u8 = 1;
const KIND_FICA: u8 = 2;
const KIND_COMMON: u8 = 3;
const KIND_TFIDF: u8 = 4;

/// Everything fitted on the reference corpus.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FittedModels<T> {
    pub tfidf: Option<TfidfModel<T>>,
    pub common_component: Option<CommonComponent<T>>,
    pub projector: Option<Projector<T>>,
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u32).to_le_bytes());
    }
    fn floats<'a, T: Real>(&mut self, vs: impl IntoIterator<Item = &'a T>) {
        for v in vs {
            self.0.extend_from_slice(&v.as_f32().to_le_bytes());
        }
    }
    fn text(&mut self, s: &str) {
        self.u32(s.len());
        self.0.extend_from_slice(s.as_bytes());
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Model(format!("truncated at byte {}", self.pos)))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }
    fn u64(&mut self) -> Result<usize> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()) as usize)
    }
    fn floats<T: Real>(&mut self, n: usize) -> Result<Vec<T>> {
        let bytes = self.take(n.checked_mul(4).ok_or_else(|| Error::Model("size overflow".into()))?)?;
        Ok(bytes
            .chunks_exact(4)
            .map(|c| T::widen_f32(f32::from_le_bytes(c.try_into().unwrap())))
            .collect())
    }
    fn matrix<T: Real>(&mut self, rows: usize, cols: usize) -> Result<Array2<T>> {
        let data = self.floats(rows * cols)?;
        Ok(Array2::from_shape_vec((rows, cols), data).expect("length checked"))
    }
    fn text(&mut self) -> Result<String> {
        let n = self.u32()?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| Error::Model("text is not UTF-8".into()))
    }
    fn finished(&self) -> bool {
        self.pos == self.bytes.len()
    }
}

fn artifact(kind: u8, body: impl FnOnce(&mut Writer)) -> Vec<u8> {
    let mut w = Writer::default();
    w.0.extend_from_slice(ARTIFACT_MAGIC);
    w.u16(VERSION);
    w.u8(kind);
    body(&mut w);
    w.0
}

impl<T: Real> FittedModels<T> {
    pub fn is_empty(&self) -> bool {
        self.tfidf.is_none() && self.common_component.is_none() && self.projector.is_none()
    }

    /// Serializes the models together with the canonical configuration text
    /// they were fitted under.
    pub fn to_bytes(&self, config: &str) -> Vec<u8> {
        let mut parts = vec![artifact(KIND_CONFIG, |w| w.text(config))];
        if let Some(m) = &self.tfidf {
            parts.push(artifact(KIND_TFIDF, |w| {
                let (lo, hi) = m.ngram_range();
                w.u32(lo);
                w.u32(hi);
                w.u8(m.binary_tf() as u8);
                w.u32(m.len());
                for t in m.terms() {
                    w.text(t);
                }
                w.floats(m.idf());
            }));
        }
        if let Some(c) = &self.common_component {
            parts.push(artifact(KIND_COMMON, |w| {
                w.u32(c.dim());
                w.floats(c.direction().iter());
            }));
        }
        match &self.projector {
            Some(Projector::Tsvd(p)) => parts.push(artifact(KIND_TSVD, |w| {
                w.u32(p.rank());
                w.u32(p.input_dim());
                w.floats(&p.singular_values);
                w.floats(p.components.iter());
            })),
            Some(Projector::Fica(p)) => parts.push(artifact(KIND_FICA, |w| {
                w.u32(p.n_components());
                w.u32(p.input_dim());
                w.u8(p.converged as u8);
                w.u32(p.iterations);
                w.floats(p.mean().iter());
                w.floats(p.whitening().iter());
                w.floats(p.unmixing().iter());
            })),
            None => {}
        }
        let mut w = Writer::default();
        w.0.extend_from_slice(BUNDLE_MAGIC);
        w.u16(VERSION);
        w.u32(parts.len());
        for p in parts {
            w.0.extend_from_slice(&(p.len() as u64).to_le_bytes());
            w.0.extend_from_slice(&p);
        }
        w.0
    }

    /// Returns the stored configuration text and the models.
    pub fn from_bytes(bytes: &[u8]) -> Result<(String, Self)> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != BUNDLE_MAGIC {
            return Err(Error::Model("not a model bundle".into()));
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(Error::Model(format!("unsupported bundle version {version}")));
        }
        let count = r.u32()?;
        let mut config = None;
        let mut models = FittedModels::default();
        for _ in 0..count {
            let len = r.u64()?;
            let mut a = Reader { bytes: r.take(len)?, pos: 0 };
            if a.take(4)? != ARTIFACT_MAGIC {
                return Err(Error::Model("artifact header missing".into()));
            }
            let version = a.u16()?;
            if version != VERSION {
                return Err(Error::Model(format!("unsupported artifact version {version}")));
            }
            match a.u8()? {
                KIND_CONFIG => config = Some(a.text()?),
                KIND_TFIDF => {
                    let (lo, hi, binary) = (a.u32()?, a.u32()?, a.u8()? != 0);
                    let v = a.u32()?;
                    let terms = (0..v).map(|_| a.text()).collect::<Result<Vec<_>>>()?;
                    let idf = a.floats(v)?;
                    models.tfidf = Some(TfidfModel::from_parts(terms, idf, (lo, hi), binary));
                }
                KIND_COMMON => {
                    let d = a.u32()?;
                    let dir = Array1::from(a.floats::<T>(d)?);
                    models.common_component = Some(CommonComponent::from_stored(dir));
                }
                KIND_TSVD => {
                    let (rank, d) = (a.u32()?, a.u32()?);
                    let singular_values = a.floats(rank)?;
                    let components = a.matrix(rank, d)?;
                    models.projector = Some(Projector::Tsvd(TsvdProjector {
                        components,
                        singular_values,
                    }));
                }
                KIND_FICA => {
                    let (n, d) = (a.u32()?, a.u32()?);
                    let converged = a.u8()? != 0;
                    let iterations = a.u32()?;
                    let mean = Array1::from(a.floats(d)?);
                    let whitening = a.matrix(n, d)?;
                    let unmixing = a.matrix(n, n)?;
                    models.projector = Some(Projector::Fica(FicaProjector::from_parts(
                        mean, whitening, unmixing, converged, iterations,
                    )?));
                }
                other => return Err(Error::Model(format!("unknown artifact kind {other}"))),
            }
            if !a.finished() {
                return Err(Error::Model("trailing bytes inside artifact".into()));
            }
        }
        if !r.finished() {
            return Err(Error::Model("trailing bytes after last artifact".into()));
        }
        let config = config.ok_or_else(|| Error::Model("bundle has no configuration".into()))?;
        Ok((config, models))
    }

    pub fn save(&self, config: &str, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes(config)).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<(String, Self)> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}
