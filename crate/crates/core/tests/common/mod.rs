//! Independent oracles and fixture generators shared by integration tests.

#![allow(dead_code)]

pub mod planted;

use ndarray::Array2;

/// Singular values of `a` by one-sided Jacobi rotations, descending.
pub fn jacobi_singular_values(a: &Array2<f64>) -> Vec<f64> {
    let mut u = if a.nrows() >= a.ncols() { a.clone() } else { a.t().to_owned() };
    let n = u.ncols();
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..u.nrows() {
                    alpha += u[[i, p]] * u[[i, p]];
                    beta += u[[i, q]] * u[[i, q]];
                    gamma += u[[i, p]] * u[[i, q]];
                }
                if gamma == 0.0 {
                    continue;
                }
                off = off.max(gamma.abs() / (alpha * beta).sqrt());
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..u.nrows() {
                    let (x, y) = (u[[i, p]], u[[i, q]]);
                    u[[i, p]] = c * x - s * y;
                    u[[i, q]] = s * x + c * y;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|j| u.column(j).iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Optimal total of a maximum-profit assignment by trying every injective
/// map from the shorter side into the longer one.
pub fn brute_force_assignment(profit: &[i64], rows: usize, cols: usize) -> i64 {
    fn go(p: &[i64], rows: usize, cols: usize, r: usize, used: &mut Vec<bool>, transposed: bool) -> i64 {
        let (short, long) = if transposed { (cols, rows) } else { (rows, cols) };
        if r == short {
            return 0;
        }
        let mut best = i64::MIN;
        for c in 0..long {
            if used[c] {
                continue;
            }
            used[c] = true;
            let v = if transposed { p[c * cols + r] } else { p[r * cols + c] };
            best = best.max(v + go(p, rows, cols, r + 1, used, transposed));
            used[c] = false;
        }
        best
    }
    let transposed = rows > cols;
    let long = rows.max(cols);
    go(profit, rows, cols, 0, &mut vec![false; long], transposed)
}

/// Minimum transport cost by enumerating basic solutions of the
/// transportation polytope. `cost` is `m × n`, `a` and `b` the marginals.
pub fn transport_by_vertices(cost: &Array2<f64>, a: &[f64], b: &[f64]) -> f64 {
    let (m, n) = cost.dim();
    let vars = m * n;
    // rows: m supply equations, then n - 1 demand equations (one is redundant)
    let eqs = m + n - 1;
    let mut coeff = Array2::<f64>::zeros((eqs, vars));
    let mut rhs = vec![0.0; eqs];
    for i in 0..m {
        for j in 0..n {
            coeff[[i, i * n + j]] = 1.0;
        }
        rhs[i] = a[i];
    }
    for j in 0..n - 1 {
        for i in 0..m {
            coeff[[m + j, i * n + j]] = 1.0;
        }
        rhs[m + j] = b[j];
    }
    let mut best = f64::INFINITY;
    let mut basis: Vec<usize> = (0..eqs).collect();
    loop {
        if let Some(x) = solve_square(&coeff, &rhs, &basis) {
            if x.iter().all(|&v| v >= -1e-12) {
                let c: f64 = basis.iter().zip(&x).map(|(&k, &v)| cost[[k / n, k % n]] * v.max(0.0)).sum();
                best = best.min(c);
            }
        }
        // next combination of `eqs` out of `vars`
        let mut i = eqs;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if basis[i] != i + vars - eqs {
                break;
            }
        }
        basis[i] += 1;
        for k in i + 1..eqs {
            basis[k] = basis[k - 1] + 1;
        }
    }
}

fn solve_square(coeff: &Array2<f64>, rhs: &[f64], cols: &[usize]) -> Option<Vec<f64>> {
    let n = cols.len();
    let mut m = Array2::<f64>::zeros((n, n + 1));
    for r in 0..n {
        for (c, &k) in cols.iter().enumerate() {
            m[[r, c]] = coeff[[r, k]];
        }
        m[[r, n]] = rhs[r];
    }
    for c in 0..n {
        let piv = (c..n).max_by(|&x, &y| m[[x, c]].abs().partial_cmp(&m[[y, c]].abs()).unwrap())?;
        if m[[piv, c]].abs() < 1e-12 {
            return None;
        }
        for k in 0..=n {
            m.swap([c, k], [piv, k]);
        }
        for r in 0..n {
            if r != c {
                let f = m[[r, c]] / m[[c, c]];
                if f != 0.0 {
                    for k in c..=n {
                        m[[r, k]] -= f * m[[c, k]];
                    }
                }
            }
        }
    }
    Some((0..n).map(|r| m[[r, n]] / m[[r, r]]).collect())
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

pub fn cosine(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let ny: f64 = y.iter().map(|a| a * a).sum::<f64>().sqrt();
    dot / (nx * ny)
}

#[test]
fn jacobi_on_diagonal() {
    let a = ndarray::array![[3.0, 0.0], [0.0, -5.0], [0.0, 0.0]];
    let sv = jacobi_singular_values(&a);
    assert!((sv[0] - 5.0).abs() < 1e-12 && (sv[1] - 3.0).abs() < 1e-12);
}

#[test]
fn vertices_on_two_by_two() {
    // moving mass 0.5 across costs 1 at best
    let cost = ndarray::array![[0.0, 1.0], [1.0, 0.0]];
    let v = transport_by_vertices(&cost, &[1.0, 0.0], &[0.5, 0.5]);
    assert!((v - 0.5).abs() < 1e-12);
}

#[test]
fn brute_force_rectangular() {
    // 2 × 3: rows take columns 2 and 0
    let p = [1, 2, 9, 8, 0, 1];
    assert_eq!(brute_force_assignment(&p, 2, 3), 17);
    // transposed
    let q = [1, 8, 2, 0, 9, 1];
    assert_eq!(brute_force_assignment(&q, 3, 2), 17);
}
