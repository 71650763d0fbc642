use crate::scalar::Real;

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<T> {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> SparseVector<T> {
    /// Builds from `(index, value)` pairs with strictly increasing indices.
    pub fn from_sorted(dim: usize, pairs: impl IntoIterator<Item = (usize, T)>) -> Self {
        let (indices, values): (Vec<usize>, Vec<T>) = pairs.into_iter().unzip();
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.last().is_none_or(|&i| i < dim));
        SparseVector { dim, indices, values }
    }

    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn norm(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn dot(&self, other: &SparseVector<T>) -> T {
        let (mut i, mut j) = (0, 0);
        let mut acc = T::zero();
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn dot_dense(&self, dense: &[T]) -> T {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    /// Scales to unit L2 norm; a zero vector is left unchanged.
    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            for v in &mut self.values {
                *v /= n;
            }
        }
        self
    }

    pub fn to_dense(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }
}
