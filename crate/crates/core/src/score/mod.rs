//! Similarity between encoded segments.

mod wmd;

use std::fmt;
use std::str::FromStr;

use ndarray::Array1;

pub use wmd::{wmd_exact, wmd_relaxed, NbowSignature, WMD_QUANTUM};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vectorize::SparseVector;

/// A segment-level vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Embedding<T> {
    Dense(Array1<T>),
    Sparse(SparseVector<T>),
}

impl<T: Real> Embedding<T> {
    pub fn dim(&self) -> usize {
        match self {
            Embedding::Dense(v) => v.len(),
            Embedding::Sparse(v) => v.dim(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Embedding::Dense(v) => v.iter().map(|x| x.as_f64() * x.as_f64()).sum::<f64>().sqrt(),
            Embedding::Sparse(v) => v.values().iter().map(|x| x.as_f64() * x.as_f64()).sum::<f64>().sqrt(),
        }
    }

    pub fn is_zero(&self) -> bool {
        !(self.norm() > 0.0)
    }

    fn dot(&self, other: &Embedding<T>) -> f64 {
        let dense_sparse = |d: &Array1<T>, s: &SparseVector<T>| s.iter().map(|(i, x)| x.as_f64() * d[i].as_f64()).sum();
        match (self, other) {
            (Embedding::Dense(a), Embedding::Dense(b)) => a.iter().zip(b).map(|(x, y)| x.as_f64() * y.as_f64()).sum(),
            (Embedding::Sparse(a), Embedding::Sparse(b)) => {
                let (ai, bi) = (a.indices(), b.indices());
                let (av, bv) = (a.values(), b.values());
                let (mut p, mut q, mut acc) = (0, 0, 0.0);
                while p < ai.len() && q < bi.len() {
                    match ai[p].cmp(&bi[q]) {
                        std::cmp::Ordering::Less => p += 1,
                        std::cmp::Ordering::Greater => q += 1,
                        std::cmp::Ordering::Equal => {
                            acc += av[p].as_f64() * bv[q].as_f64();
                            p += 1;
                            q += 1;
                        }
                    }
                }
                acc
            }
            (Embedding::Dense(d), Embedding::Sparse(s)) | (Embedding::Sparse(s), Embedding::Dense(d)) => {
                dense_sparse(d, s)
            }
        }
    }
}

/// `u·v / (‖u‖‖v‖)`, computed in `f64`.
pub fn cosine<T: Real>(u: &Embedding<T>, v: &Embedding<T>) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::Invalid(format!(
            "cosine of vectors with dimensions {} and {}",
            u.dim(),
            v.dim()
        )));
    }
    let (nu, nv) = (u.norm(), v.norm());
    if !(nu > 0.0 && nv > 0.0) {
        return Err(Error::Invalid("cosine of a zero-norm vector".into()));
    }
    Ok((u.dot(v) / (nu * nv)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedPoolingPolicy {
    #[default]
    Mean,
    Max,
}

impl FromStr for SeedPoolingPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(SeedPoolingPolicy::Mean),
            "max" => Ok(SeedPoolingPolicy::Max),
            other => Err(Error::Config(format!("unknown pooling policy {other:?}"))),
        }
    }
}

impl fmt::Display for SeedPoolingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeedPoolingPolicy::Mean => "mean",
            SeedPoolingPolicy::Max => "max",
        })
    }
}

/// Combines one similarity per seed into a candidate score.
pub fn pool_over_seeds(scores: &[f64], policy: SeedPoolingPolicy) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::Invalid("no seed scores to pool".into()));
    }
    Ok(match policy {
        SeedPoolingPolicy::Mean => scores.iter().sum::<f64>() / scores.len() as f64,
        SeedPoolingPolicy::Max => scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}
