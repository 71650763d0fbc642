//! Token-matrix aggregators and segment-vector projectors.

mod aggregate;
mod dct;
mod fica;
mod sif;
mod tsvd;

use ndarray::Array1;

pub use aggregate::{max_aggregate, mean_aggregate};
pub use dct::dct_aggregate;
pub use fica::{fit_fica, FicaOptions, FicaProjector};
pub use sif::{sif_aggregate, sif_weight, CommonComponent, DEFAULT_SIF_A};
pub use tsvd::{fit_tsvd, TsvdOptions, TsvdProjector};

use crate::scalar::Real;
use crate::vectorize::SparseVector;

/// A fitted dimensionality reduction.
#[derive(Debug, Clone, PartialEq)]
pub enum Projector<T> {
    Tsvd(TsvdProjector<T>),
    Fica(FicaProjector<T>),
}

impl<T: Real> Projector<T> {
    pub fn input_dim(&self) -> usize {
        match self {
            Projector::Tsvd(p) => p.input_dim(),
            Projector::Fica(p) => p.input_dim(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            Projector::Tsvd(p) => p.rank(),
            Projector::Fica(p) => p.n_components(),
        }
    }

    pub fn project_dense(&self, v: &[T]) -> Array1<T> {
        match self {
            Projector::Tsvd(p) => p.project_dense(v),
            Projector::Fica(p) => p.project(v),
        }
    }

    pub fn project_sparse(&self, v: &SparseVector<T>) -> Array1<T> {
        match self {
            Projector::Tsvd(p) => p.project_sparse(v),
            Projector::Fica(p) => p.project(&v.to_dense()),
        }
    }
}
