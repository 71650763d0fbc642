//! FastICA with the logcosh contrast and symmetric decorrelation.

use log::warn;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::linalg::{self, symmetric_eigen};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FicaOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for FicaOptions {
    fn default() -> Self {
        FicaOptions {
            tol: 1e-4,
            max_iter: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FicaProjector<T> {
    mean: Array1<T>,
    /// `n × d`
    whitening: Array2<T>,
    /// `n × n`
    unmixing: Array2<T>,
    /// `unmixing · whitening`
    filters: Array2<T>,
    pub converged: bool,
    pub iterations: usize,
}

impl<T: Real> FicaProjector<T> {
    pub fn from_parts(
        mean: Array1<T>,
        whitening: Array2<T>,
        unmixing: Array2<T>,
        converged: bool,
        iterations: usize,
    ) -> Result<Self> {
        let (n, d) = whitening.dim();
        if mean.len() != d || unmixing.dim() != (n, n) {
            return Err(Error::Model(format!(
                "fICA shapes disagree: mean {}, whitening {n}×{d}, unmixing {:?}",
                mean.len(),
                unmixing.dim()
            )));
        }
        let filters = unmixing.dot(&whitening);
        Ok(FicaProjector {
            mean,
            whitening,
            unmixing,
            filters,
            converged,
            iterations,
        })
    }

    pub fn n_components(&self) -> usize {
        self.unmixing.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> ArrayView1<'_, T> {
        self.mean.view()
    }

    pub fn whitening(&self) -> ArrayView2<'_, T> {
        self.whitening.view()
    }

    pub fn unmixing(&self) -> ArrayView2<'_, T> {
        self.unmixing.view()
    }

    /// `W K (v − μ)`.
    pub fn project(&self, v: &[T]) -> Array1<T> {
        let centered = &ArrayView1::from(v) - &self.mean;
        self.filters.dot(&centered)
    }
}

/// `(W Wᵀ)^{-1/2} W`
fn decorrelate(w: &Array2<f64>) -> Array2<f64> {
    let (vals, vecs) = symmetric_eigen(&w.dot(&w.t()));
    let inv_sqrt = Array1::from_iter(vals.iter().map(|&l| 1.0 / l.max(f64::MIN_POSITIVE).sqrt()));
    let scaled = &vecs * &inv_sqrt.insert_axis(Axis(0));
    scaled.dot(&vecs.t()).dot(w)
}

/// Fits on the rows of `x` (samples × features).
pub fn fit_fica<T: Real>(x: ArrayView2<T>, n_components: usize, options: &FicaOptions) -> Result<FicaProjector<T>> {
    let (samples, d) = x.dim();
    if n_components == 0 || n_components > d {
        return Err(Error::Config(format!(
            "fICA needs 1 ≤ n_components ≤ {d}, got {n_components}"
        )));
    }
    if samples < n_components {
        return Err(Error::Config(format!(
            "fICA with {n_components} components needs at least as many samples, got {samples}"
        )));
    }
    let xf = x.mapv(T::as_f64);
    let mean = xf.mean_axis(Axis(0)).expect("non-empty");
    let centered = &xf - &mean.view().insert_axis(Axis(0));
    let cov = centered.t().dot(&centered) / samples as f64;
    let (vals, vecs) = symmetric_eigen(&cov);
    let top = vals[0].max(0.0);
    if !(vals[n_components - 1] > top * 1e-12) {
        return Err(Error::Numerical(format!(
            "covariance has rank below {n_components}; cannot whiten"
        )));
    }
    // K = diag(λ^{-1/2}) Eᵀ
    let mut whitening = Array2::zeros((n_components, d));
    for i in 0..n_components {
        let s = 1.0 / vals[i].sqrt();
        whitening.row_mut(i).assign(&vecs.column(i).mapv(|v| v * s));
    }
    let z = centered.dot(&whitening.t());

    let mut rng = Xoshiro256PlusPlus::seed_from_u64(options.seed);
    let init = Array2::from_shape_simple_fn((n_components, n_components), || StandardNormal.sample(&mut rng));
    let mut w = decorrelate(&init);
    let mut best = (f64::INFINITY, w.clone());
    let mut converged = false;
    let mut iterations = 0;
    let nf = samples as f64;
    for it in 1..=options.max_iter {
        iterations = it;
        let y = z.dot(&w.t());
        let g = y.mapv(f64::tanh);
        let g_prime_mean = g.mapv(|t| 1.0 - t * t).mean_axis(Axis(0)).expect("non-empty");
        let mut next = g.t().dot(&z) / nf;
        next -= &(&w * &g_prime_mean.insert_axis(Axis(1)));
        let next = decorrelate(&next);
        let lim = next
            .rows()
            .into_iter()
            .zip(w.rows())
            .map(|(a, b)| (a.dot(&b).abs() - 1.0).abs())
            .fold(0.0f64, f64::max);
        w = next;
        if lim < best.0 {
            best = (lim, w.clone());
        }
        if lim < options.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        warn!(
            "fICA did not converge after {} iterations (best change {:.3e})",
            options.max_iter, best.0
        );
        w = best.1;
    }
    FicaProjector::from_parts(
        linalg::vec_to_real(mean.as_slice().expect("contiguous")),
        linalg::to_real(&whitening),
        linalg::to_real(&w),
        converged,
        iterations,
    )
}
