use ndarray::{Array1, ArrayView1, ArrayView2};

use super::tsvd::{fit_tsvd, TsvdOptions};
use crate::error::{Error, Result};
use crate::linalg::DenseOperator;
use crate::scalar::Real;

pub const DEFAULT_SIF_A: f64 = 1e-3;

/// `a / (a + f_r)`.
pub fn sif_weight(f_r: f64, a: f64) -> f64 {
    a / (a + f_r)
}

/// Frequency-weighted mean `Σ w_i v_i / n` over the rows.
pub fn sif_aggregate<T: Real>(m: ArrayView2<T>, f_r: &[f64], a: f64) -> Result<Array1<T>> {
    if m.nrows() == 0 {
        return Err(Error::Invalid("SIF aggregate of an empty token matrix".into()));
    }
    if f_r.len() != m.nrows() {
        return Err(Error::Invalid(format!(
            "{} frequencies for {} token vectors",
            f_r.len(),
            m.nrows()
        )));
    }
    if !(a > 0.0) {
        return Err(Error::Config(format!("SIF parameter a must be positive, got {a}")));
    }
    let mut out = Array1::zeros(m.ncols());
    for (row, &f) in m.rows().into_iter().zip(f_r) {
        out.scaled_add(T::cast(sif_weight(f, a)), &row);
    }
    let n = T::cast(m.nrows() as f64);
    Ok(out.mapv(|v| v / n))
}

/// First right singular vector of a stacked set of segment vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonComponent<T> {
    direction: Array1<T>,
}

impl<T: Real> CommonComponent<T> {
    pub fn fit(vectors: ArrayView2<T>) -> Result<Self> {
        if vectors.nrows() < 2 {
            return Err(Error::Invalid(
                "common component needs at least 2 segment vectors".into(),
            ));
        }
        if vectors.iter().all(|v| v.is_zero()) {
            return Err(Error::Invalid("common component of an all-zero matrix".into()));
        }
        let p = fit_tsvd::<f64>(&DenseOperator::new(vectors), 1, &TsvdOptions::default())?;
        Self::from_direction(p.components.row(0).mapv(T::cast))
    }

    /// Wraps a direction, rescaling it to unit length.
    pub fn from_direction(direction: Array1<T>) -> Result<Self> {
        let norm = direction.iter().map(|v| v.as_f64() * v.as_f64()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Invalid("common component must be a non-zero vector".into()));
        }
        Ok(CommonComponent {
            direction: direction.mapv(|v| T::cast(v.as_f64() / norm)),
        })
    }

    /// Wraps a direction that is already unit length, without rescaling.
    pub fn from_stored(direction: Array1<T>) -> Self {
        CommonComponent { direction }
    }

    pub fn direction(&self) -> ArrayView1<'_, T> {
        self.direction.view()
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    /// `v − (v·u) u`.
    pub fn remove(&self, v: ArrayView1<T>) -> Array1<T> {
        let proj = v.dot(&self.direction);
        let mut out = v.to_owned();
        out.scaled_add(-proj, &self.direction);
        out
    }
}
