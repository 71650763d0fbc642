//! Dense and sparse linear-algebra helpers. Decompositions run in `f64`
//! through nalgebra regardless of the storage scalar.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vectorize::SparseVector;

/// A matrix accessed only through products with dense blocks.
pub trait LinearOperator: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `A · x` for `x` of shape `ncols × k`.
    fn mul(&self, x: &Array2<f64>) -> Array2<f64>;
    /// `Aᵀ · x` for `x` of shape `nrows × k`.
    fn tmul(&self, x: &Array2<f64>) -> Array2<f64>;
}

/// Dense row-major operator.
pub struct DenseOperator<'a, T> {
    a: ArrayView2<'a, T>,
}

impl<'a, T: Real> DenseOperator<'a, T> {
    pub fn new(a: ArrayView2<'a, T>) -> Self {
        DenseOperator { a }
    }
}

impl<T: Real> LinearOperator for DenseOperator<'_, T> {
    fn nrows(&self) -> usize {
        self.a.nrows()
    }
    fn ncols(&self) -> usize {
        self.a.ncols()
    }
    fn mul(&self, x: &Array2<f64>) -> Array2<f64> {
        self.a.dot(&x.mapv(T::cast)).mapv(T::as_f64)
    }
    fn tmul(&self, x: &Array2<f64>) -> Array2<f64> {
        self.a.t().dot(&x.mapv(T::cast)).mapv(T::as_f64)
    }
}

impl LinearOperator for ArrayView2<'_, f64> {
    fn nrows(&self) -> usize {
        self.dim().0
    }
    fn ncols(&self) -> usize {
        self.dim().1
    }
    fn mul(&self, x: &Array2<f64>) -> Array2<f64> {
        self.dot(x)
    }
    fn tmul(&self, x: &Array2<f64>) -> Array2<f64> {
        self.t().dot(x)
    }
}

/// Compressed sparse rows.
#[derive(Debug, Clone)]
pub struct CsrMatrix<T> {
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    pub fn from_rows<'a>(ncols: usize, rows: impl IntoIterator<Item = &'a SparseVector<T>>) -> Self {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for r in rows {
            debug_assert_eq!(r.dim(), ncols);
            indices.extend_from_slice(r.indices());
            values.extend_from_slice(r.values());
            indptr.push(indices.len());
        }
        CsrMatrix {
            ncols,
            indptr,
            indices,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }
}

impl<T: Real> LinearOperator for CsrMatrix<T> {
    fn nrows(&self) -> usize {
        self.indptr.len() - 1
    }
    fn ncols(&self) -> usize {
        self.ncols
    }
    fn mul(&self, x: &Array2<f64>) -> Array2<f64> {
        let k = x.ncols();
        let mut out = Array2::zeros((self.nrows(), k));
        for (r, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
            for p in self.indptr[r]..self.indptr[r + 1] {
                let v = self.values[p].as_f64();
                row.scaled_add(v, &x.row(self.indices[p]));
            }
        }
        out
    }
    fn tmul(&self, x: &Array2<f64>) -> Array2<f64> {
        let k = x.ncols();
        let mut out = Array2::zeros((self.ncols, k));
        for r in 0..self.nrows() {
            let xr = x.row(r);
            for p in self.indptr[r]..self.indptr[r + 1] {
                let v = self.values[p].as_f64();
                out.row_mut(self.indices[p]).scaled_add(v, &xr);
            }
        }
        out
    }
}

pub(crate) fn to_nalgebra(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub(crate) fn from_nalgebra(m: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Orthonormal basis `Q` and triangular `R` with `y = Q R`.
/// Uses two passes of Cholesky QR, falling back to Householder QR when the
/// Gram matrix is numerically singular.
pub fn orthonormalize(y: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    if y.nrows() >= y.ncols() {
        if let Some((q1, r1)) = cholesky_qr(y) {
            if let Some((q2, r2)) = cholesky_qr(&q1) {
                return (q2, r2.dot(&r1));
            }
        }
    }
    let qr = to_nalgebra(y).qr();
    (from_nalgebra(&qr.q()), from_nalgebra(&qr.r()))
}

fn cholesky_qr(y: &Array2<f64>) -> Option<(Array2<f64>, Array2<f64>)> {
    let k = y.ncols();
    let gram = to_nalgebra(&y.t().dot(y));
    let chol = gram.cholesky()?;
    let l = chol.l();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..k {
        lo = lo.min(l[(i, i)].abs());
        hi = hi.max(l[(i, i)].abs());
    }
    if !(lo > hi * 1e-6) {
        return None;
    }
    let r = l.transpose();
    let r_inv = r.clone().solve_upper_triangular(&DMatrix::identity(k, k))?;
    Some((y.dot(&from_nalgebra(&r_inv)), from_nalgebra(&r)))
}

/// Singular values of a small dense matrix, descending.
pub fn singular_values(a: &Array2<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = to_nalgebra(a).singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Thin SVD `a = U diag(s) Vᵀ` with singular values descending.
pub fn svd(a: &Array2<f64>) -> Result<(Array2<f64>, Vec<f64>, Array2<f64>)> {
    let m = to_nalgebra(a);
    let svd = m.svd(true, true);
    let u = svd.u.ok_or_else(|| Error::Numerical("SVD did not return U".into()))?;
    let vt = svd.v_t.ok_or_else(|| Error::Numerical("SVD did not return Vᵀ".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let s = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = Array2::from_shape_fn((u.nrows(), order.len()), |(r, c)| u[(r, order[c])]);
    let vt_sorted = Array2::from_shape_fn((order.len(), vt.ncols()), |(r, c)| vt[(order[r], c)]);
    Ok((u_sorted, s, vt_sorted))
}

/// Eigendecomposition of a symmetric matrix: eigenvalues descending, with
/// eigenvectors as matching columns.
pub fn symmetric_eigen(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let eig = SymmetricEigen::new(to_nalgebra(a));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = a.nrows();
    let vectors = Array2::from_shape_fn((n, order.len()), |(r, c)| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Flips the sign of each row so that its largest-magnitude entry is
/// positive.
pub fn canonical_row_signs(m: &mut Array2<f64>) {
    for mut row in m.axis_iter_mut(Axis(0)) {
        let mut best = 0.0f64;
        for &v in row.iter() {
            if v.abs() > best.abs() {
                best = v;
            }
        }
        if best < 0.0 {
            row.mapv_inplace(|v| -v);
        }
    }
}

pub(crate) fn to_real<T: Real>(a: &Array2<f64>) -> Array2<T> {
    a.mapv(T::cast)
}

pub(crate) fn vec_to_real<T: Real>(a: &[f64]) -> Array1<T> {
    a.iter().map(|&v| T::cast(v)).collect()
}
