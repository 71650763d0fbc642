use ndarray::{Array1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Real;

fn non_empty<T>(m: &ArrayView2<T>, what: &str) -> Result<()> {
    if m.nrows() == 0 {
        return Err(Error::Invalid(format!("{what} of an empty token matrix")));
    }
    Ok(())
}

/// Element-wise mean of the rows.
pub fn mean_aggregate<T: Real>(m: ArrayView2<T>) -> Result<Array1<T>> {
    non_empty(&m, "mean")?;
    let n = T::cast(m.nrows() as f64);
    Ok(m.sum_axis(Axis(0)).mapv(|v| v / n))
}

/// Element-wise maximum of the rows.
pub fn max_aggregate<T: Real>(m: ArrayView2<T>) -> Result<Array1<T>> {
    non_empty(&m, "max")?;
    let mut out = m.row(0).to_owned();
    for row in m.rows().into_iter().skip(1) {
        out.zip_mut_with(&row, |a, &b| {
            if b > *a {
                *a = b;
            }
        });
    }
    Ok(out)
}
