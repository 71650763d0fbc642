use num_traits::{Bounded, Signed};

/// A one-to-one assignment and its total profit.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentResult<T> {
    /// `(row, column)` pairs, sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub total: T,
}

/// Maximum-profit assignment of `min(rows, cols)` pairs on a row-major
/// `rows × cols` matrix. Rectangular inputs are padded with zero profit.
pub fn hungarian_max<T>(profit: &[T], rows: usize, cols: usize) -> AssignmentResult<T>
where
    T: Signed + Bounded + Copy + PartialOrd,
{
    assert_eq!(profit.len(), rows * cols, "profit matrix shape");
    if rows == 0 || cols == 0 {
        return AssignmentResult {
            pairs: Vec::new(),
            total: T::zero(),
        };
    }
    let n = rows.max(cols);
    let cost = |i: usize, j: usize| -> T {
        if i < rows && j < cols {
            -profit[i * cols + j]
        } else {
            T::zero()
        }
    };
    // potentials and matching use 1-based indices with a virtual column 0
    let inf = T::max_value();
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut pairs = Vec::with_capacity(rows.min(cols));
    let mut total = T::zero();
    for j in 1..=n {
        let (r, c) = (p[j] - 1, j - 1);
        if r < rows && c < cols {
            pairs.push((r, c));
            total = total + profit[r * cols + c];
        }
    }
    pairs.sort_unstable();
    AssignmentResult { pairs, total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(m: &[i64], rows: usize, cols: usize) -> i64 {
        fn go(m: &[i64], rows: usize, cols: usize, r: usize, used: &mut Vec<bool>) -> i64 {
            if r == rows {
                return 0;
            }
            // a row may also stay unassigned when rows > cols
            let mut best = if rows > cols { go(m, rows, cols, r + 1, used) } else { i64::MIN };
            for c in 0..cols {
                if !used[c] {
                    used[c] = true;
                    best = best.max(m[r * cols + c] + go(m, rows, cols, r + 1, used));
                    used[c] = false;
                }
            }
            best
        }
        go(m, rows, cols, 0, &mut vec![false; cols])
    }

    #[test]
    fn small_cases() {
        let r = hungarian_max(&[5i64], 1, 1);
        assert_eq!((r.pairs, r.total), (vec![(0, 0)], 5));
        let r = hungarian_max(&[3i64, 1, 1, 3], 2, 2);
        assert_eq!((r.pairs, r.total), (vec![(0, 0), (1, 1)], 6));
        let r = hungarian_max::<i64>(&[], 0, 3);
        assert!(r.pairs.is_empty() && r.total == 0);
    }

    #[test]
    fn rectangular_assigns_min_side() {
        let m = [1i64, 9, 4, 7, 2, 8];
        let r = hungarian_max(&m, 2, 3);
        assert_eq!(r.pairs.len(), 2);
        assert_eq!(r.total, 9 + 8);
        let r = hungarian_max(&[1.5f64, 0.5, 2.0], 3, 1);
        assert_eq!(r.pairs, vec![(2, 0)]);
    }

    proptest! {
        #[test]
        fn equals_brute_force(rows in 1usize..6, cols in 1usize..6, seed in prop::collection::vec(0i64..50, 36)) {
            let m: Vec<i64> = seed[..rows * cols].to_vec();
            let r = hungarian_max(&m, rows, cols);
            prop_assert_eq!(r.total, brute(&m, rows, cols));
            prop_assert_eq!(r.pairs.len(), rows.min(cols));
            let sum: i64 = r.pairs.iter().map(|&(i, j)| m[i * cols + j]).sum();
            prop_assert_eq!(sum, r.total);
        }
    }
}
