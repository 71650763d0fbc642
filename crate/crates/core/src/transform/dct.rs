use std::f64::consts::PI;

use ndarray::{Array1, ArrayView2};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Orthonormal DCT-II along the token axis, keeping orders `0..=k` for every
/// dimension. Orders at or beyond the sequence length are zero. The output is
/// laid out as `[c0 (d values), c1 (d values), ...]`.
pub fn dct_aggregate<T: Real>(m: ArrayView2<T>, k: usize) -> Result<Array1<T>> {
    let (n, d) = m.dim();
    if n == 0 {
        return Err(Error::Invalid("DCT of an empty token matrix".into()));
    }
    let mut out = Array1::zeros((k + 1) * d);
    let nf = n as f64;
    for order in 0..=k.min(n - 1) {
        let scale = if order == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        let mut acc = vec![0.0f64; d];
        for (t, row) in m.rows().into_iter().enumerate() {
            let c = (PI * (2 * t + 1) as f64 * order as f64 / (2.0 * nf)).cos();
            for (a, v) in acc.iter_mut().zip(row.iter()) {
                *a += c * v.as_f64();
            }
        }
        for (j, a) in acc.into_iter().enumerate() {
            out[order * d + j] = T::cast(scale * a);
        }
    }
    Ok(out)
}
