//! Truncated SVD by randomized subspace iteration.
//!
//! A Gaussian sketch of width `rank + oversample` is multiplied through the
//! operator and re-orthonormalized on each pass. After the minimum number of
//! power passes, iteration continues until the leading Ritz values change by
//! less than `tol` (relative) or `max_power_iters` is reached. The reduced
//! matrix `Qᵀ A` is then decomposed exactly.
//!
//! When the sketch would cover more than `direct_ratio` of the shorter
//! dimension, power iteration converges slowly and costs more than the
//! problem itself; the basis `Q` is then taken from an eigendecomposition of
//! the smaller Gram matrix instead, followed by the same final step.

use ndarray::{s, Array1, Array2};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::linalg::{self, orthonormalize, singular_values, LinearOperator};
use crate::scalar::Real;
use crate::vectorize::SparseVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsvdOptions {
    pub oversample: usize,
    /// Minimum number of power passes.
    pub power_iters: usize,
    pub max_power_iters: usize,
    pub tol: f64,
    pub seed: u64,
    /// Use the Gram-matrix basis when `rank + oversample` exceeds this
    /// fraction of `min(rows, cols)`. `1.0` always iterates.
    pub direct_ratio: f64,
}

impl Default for TsvdOptions {
    fn default() -> Self {
        TsvdOptions {
            oversample: 10,
            power_iters: 2,
            max_power_iters: 32,
            tol: 1e-10,
            seed: 0,
            direct_ratio: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsvdProjector<T> {
    /// `rank × dim`, orthonormal rows.
    pub components: Array2<T>,
    /// Descending.
    pub singular_values: Vec<T>,
}

impl<T: Real> TsvdProjector<T> {
    pub fn rank(&self) -> usize {
        self.components.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.components.ncols()
    }

    pub fn project_dense(&self, v: &[T]) -> Array1<T> {
        self.components.dot(&ndarray::ArrayView1::from(v))
    }

    pub fn project_sparse(&self, v: &SparseVector<T>) -> Array1<T> {
        let mut out = Array1::zeros(self.rank());
        for (j, x) in v.iter() {
            out.scaled_add(x, &self.components.column(j));
        }
        out
    }
}

fn gaussian(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(&mut rng))
}

fn converged(prev: &[f64], cur: &[f64], tol: f64) -> bool {
    let scale = cur.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    prev.iter()
        .zip(cur)
        .all(|(p, c)| (p - c).abs() <= tol * c.abs().max(scale * 1e-12))
}

fn power_basis(op: &dyn LinearOperator, rank: usize, width: usize, options: &TsvdOptions) -> Array2<f64> {
    let (mut q, _) = orthonormalize(&op.mul(&gaussian(op.ncols(), width, options.seed)));
    let mut prev: Option<Vec<f64>> = None;
    let max_iters = options.max_power_iters.max(options.power_iters);
    for pass in 1..=max_iters {
        let (z, _) = orthonormalize(&op.tmul(&q));
        let (qn, r) = orthonormalize(&op.mul(&z));
        q = qn;
        let ritz: Vec<f64> = singular_values(&r).into_iter().take(rank).collect();
        let done = pass >= options.power_iters
            && prev.as_deref().is_some_and(|p| converged(p, &ritz, options.tol));
        if done {
            break;
        }
        prev = Some(ritz);
    }
    q
}

const GRAM_BLOCK: usize = 64;

/// Leading `width` left singular directions from `A Aᵀ` or `Aᵀ A`, whichever
/// is smaller, built a block of unit vectors at a time.
fn gram_basis(op: &dyn LinearOperator, width: usize) -> Array2<f64> {
    let (rows, cols) = (op.nrows(), op.ncols());
    let n = rows.min(cols);
    let mut g = Array2::<f64>::zeros((n, n));
    for lo in (0..n).step_by(GRAM_BLOCK) {
        let hi = (lo + GRAM_BLOCK).min(n);
        let mut e = Array2::<f64>::zeros((n, hi - lo));
        for j in lo..hi {
            e[[j, j - lo]] = 1.0;
        }
        let block = if rows <= cols { op.mul(&op.tmul(&e)) } else { op.tmul(&op.mul(&e)) };
        g.slice_mut(s![.., lo..hi]).assign(&block);
    }
    let (_, vectors) = linalg::symmetric_eigen(&g);
    let top = vectors.slice(s![.., ..width]).to_owned();
    if rows <= cols {
        top
    } else {
        orthonormalize(&op.mul(&top)).0
    }
}

pub fn fit_tsvd<T: Real>(
    op: &dyn LinearOperator,
    rank: usize,
    options: &TsvdOptions,
) -> Result<TsvdProjector<T>> {
    let (rows, cols) = (op.nrows(), op.ncols());
    let limit = rows.min(cols);
    if rank == 0 || rank > limit {
        return Err(Error::Config(format!(
            "tSVD rank {rank} infeasible for a {rows}×{cols} matrix"
        )));
    }
    let width = (rank + options.oversample).min(limit);

    let q = if width as f64 > options.direct_ratio * limit as f64 {
        gram_basis(op, width)
    } else {
        power_basis(op, rank, width, options)
    };

    // Bᵀ = Aᵀ Q = Z R, R = U S Wᵀ  =>  right singular vectors Z U
    let (z, r) = orthonormalize(&op.tmul(&q));
    let (u, sv, _) = linalg::svd(&r)?;
    let v = z.dot(&u);
    let mut components = v.slice(s![.., ..rank]).t().to_owned();
    linalg::canonical_row_signs(&mut components);
    Ok(TsvdProjector {
        components: linalg::to_real(&components),
        singular_values: sv[..rank].iter().map(|&x| T::cast(x)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseOperator;
    use ndarray::array;

    fn fit<T: Real>(a: &Array2<T>, r: usize) -> Result<TsvdProjector<T>> {
        fit_tsvd(&DenseOperator::new(a.view()), r, &TsvdOptions::default())
    }

    #[test]
    fn identity_singular_values() {
        let a: Array2<f64> = Array2::eye(3);
        let p = fit(&a, 2).unwrap();
        for s in &p.singular_values {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_outer_product() {
        let u: Array1<f64> = array![1.0, -2.0, 0.5, 3.0];
        let v: Array1<f64> = array![2.0, 1.0, -1.0];
        let a: Array2<f64> = Array2::from_shape_fn((4, 3), |(i, j)| u[i] * v[j]);
        let p = fit(&a, 2).unwrap();
        let want = u.dot(&u).sqrt() * v.dot(&v).sqrt();
        assert!((p.singular_values[0] - want).abs() < 1e-10 * want);
        assert!(p.singular_values[1].abs() < 1e-8);
    }

    #[test]
    fn rank_infeasible() {
        let a: Array2<f64> = Array2::zeros((4, 3));
        assert!(matches!(fit(&a, 4), Err(Error::Config(_))));
        assert!(fit(&a, 0).is_err());
    }

    #[test]
    fn matches_dense_svd_and_rows_orthonormal() {
        let a = gaussian(25, 18, 11);
        let p = fit(&a, 6).unwrap();
        let (_, s, _) = linalg::svd(&a).unwrap();
        for k in 0..6 {
            assert!((p.singular_values[k] - s[k]).abs() <= 1e-8 * s[k]);
        }
        let g = p.components.dot(&p.components.t());
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g[[i, j]] - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn sparse_and_dense_projection_agree() {
        let a = gaussian(10, 8, 2);
        let p = fit(&a, 3).unwrap();
        let sv = SparseVector::from_sorted(8, [(1, 0.5), (6, -2.0)]);
        let d = p.project_dense(&sv.to_dense());
        let s = p.project_sparse(&sv);
        assert!((&d - &s).iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn direct_and_iterated_bases_agree() {
        for (r, c) in [(30, 45), (45, 30)] {
            let a = gaussian(r, c, 9);
            let op = DenseOperator::new(a.view());
            let direct = TsvdOptions { direct_ratio: 0.0, ..TsvdOptions::default() };
            let iterated = TsvdOptions { direct_ratio: 1.0, ..TsvdOptions::default() };
            let p: TsvdProjector<f64> = fit_tsvd(&op, 5, &direct).unwrap();
            let q: TsvdProjector<f64> = fit_tsvd(&op, 5, &iterated).unwrap();
            for k in 0..5 {
                assert!((p.singular_values[k] - q.singular_values[k]).abs() <= 1e-9 * q.singular_values[k]);
                let dot = p.components.row(k).dot(&q.components.row(k));
                assert!((dot - 1.0).abs() < 1e-6, "component {k}: {dot}");
            }
        }
    }

    #[test]
    fn preserves_cosine_ranking_on_low_rank_data() {
        // rows live in a 4-dimensional subspace of R^40
        let basis = gaussian(4, 40, 5);
        let coef = gaussian(60, 4, 6);
        let a = coef.dot(&basis);
        let p = fit(&a, 6).unwrap();
        let proj = a.dot(&p.components.t());
        let cos = |m: &Array2<f64>, i: usize, j: usize| {
            let (x, y) = (m.row(i), m.row(j));
            x.dot(&y) / (x.dot(&x).sqrt() * y.dot(&y).sqrt())
        };
        let mut agree = 0;
        let mut total = 0;
        for q in 0..20 {
            let best = |m: &Array2<f64>| {
                (0..60)
                    .filter(|&j| j != q)
                    .max_by(|&i, &j| cos(m, q, i).total_cmp(&cos(m, q, j)))
                    .unwrap()
            };
            total += 1;
            if best(&a) == best(&proj) {
                agree += 1;
            }
        }
        assert!(agree as f64 >= 0.95 * total as f64);
    }
}
