//! Word Mover's Distance between normalized bags of token vectors.
//!
//! The exact distance solves the transportation problem by successive
//! shortest paths with Dijkstra on reduced costs. Masses are scaled to
//! integers summing to [`WMD_QUANTUM`] so that every augmentation moves a
//! whole number of units and the solver terminates deterministically.

use std::collections::HashMap;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const WMD_QUANTUM: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct NbowSignature<T> {
    tokens: Vec<String>,
    weights: Vec<f64>,
    vectors: Array2<T>,
}

impl<T: Real> NbowSignature<T> {
    /// Normalized counts over the unique keys. Rows sharing a key share a
    /// vector; the first occurrence is kept.
    pub fn from_bag<S: AsRef<str>>(keys: &[S], rows: ArrayView2<T>) -> Result<Self> {
        if keys.len() != rows.nrows() {
            return Err(Error::Invalid(format!("{} keys for {} vectors", keys.len(), rows.nrows())));
        }
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut first = Vec::new();
        let mut counts: Vec<f64> = Vec::new();
        for (i, k) in keys.iter().enumerate() {
            let k = k.as_ref();
            match index.get(k) {
                Some(&slot) => counts[slot] += 1.0,
                None => {
                    index.insert(k, first.len());
                    first.push(i);
                    counts.push(1.0);
                }
            }
        }
        let total = keys.len() as f64;
        let vectors = Array2::from_shape_fn((first.len(), rows.ncols()), |(r, c)| rows[[first[r], c]]);
        Self::new(
            first.iter().map(|&i| keys[i].as_ref().to_string()).collect(),
            counts.into_iter().map(|c| c / total).collect(),
            vectors,
        )
    }

    /// Uniform weights, one entry per row.
    pub fn from_points(rows: ArrayView2<T>) -> Result<Self> {
        let n = rows.nrows();
        Self::new(
            (0..n).map(|i| i.to_string()).collect(),
            vec![1.0 / n.max(1) as f64; n],
            rows.to_owned(),
        )
    }

    pub fn new(tokens: Vec<String>, weights: Vec<f64>, vectors: Array2<T>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::Invalid("empty nBOW signature".into()));
        }
        if tokens.len() != weights.len() || weights.len() != vectors.nrows() {
            return Err(Error::Invalid("nBOW tokens, weights and vectors differ in length".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Invalid("nBOW weights must be positive".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("nBOW weights sum to {sum}, not 1")));
        }
        Ok(NbowSignature { tokens, weights, vectors })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn vectors(&self) -> ArrayView2<'_, T> {
        self.vectors.view()
    }
}

fn ground_costs<T: Real>(a: &NbowSignature<T>, b: &NbowSignature<T>) -> Result<Array2<f64>> {
    if a.vectors.ncols() != b.vectors.ncols() {
        return Err(Error::Invalid(format!(
            "WMD between {}- and {}-dimensional vectors",
            a.vectors.ncols(),
            b.vectors.ncols()
        )));
    }
    Ok(Array2::from_shape_fn((a.len(), b.len()), |(i, j)| {
        a.vectors
            .row(i)
            .iter()
            .zip(b.vectors.row(j))
            .map(|(x, y)| {
                let d = x.as_f64() - y.as_f64();
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }))
}

/// Integer masses summing to the quantum, by largest remainder.
fn quantize(weights: &[f64]) -> Vec<i64> {
    let q = WMD_QUANTUM as f64;
    let sum: f64 = weights.iter().sum();
    let scaled: Vec<f64> = weights.iter().map(|w| w / sum * q).collect();
    let mut out: Vec<i64> = scaled.iter().map(|s| s.floor() as i64).collect();
    let short = WMD_QUANTUM as i64 - out.iter().sum::<i64>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&i, &j| {
        let (ri, rj) = (scaled[i] - scaled[i].floor(), scaled[j] - scaled[j].floor());
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    for &i in order.iter().cycle().take(short.max(0) as usize) {
        out[i] += 1;
    }
    out
}

/// Minimum-cost transport between two mass vectors with equal integral
/// totals.
fn transport(supply: &[i64], demand: &[i64], cost: &Array2<f64>) -> f64 {
    let (m, n) = (supply.len(), demand.len());
    // node layout: rows 0..m, columns m..m+n, then sink and source
    let sink = m + n;
    let src = m + n + 1;
    let v = m + n + 2;
    let none = usize::MAX;
    let mut rem_a = supply.to_vec();
    let mut rem_b = demand.to_vec();
    let mut flow = vec![0i64; m * n];
    let mut pot = vec![0.0f64; v];
    let mut remaining: i64 = rem_a.iter().sum();

    let mut dist = vec![f64::INFINITY; v];
    let mut parent = vec![none; v];
    let mut done = vec![false; v];
    while remaining > 0 {
        dist.fill(f64::INFINITY);
        parent.fill(none);
        done.fill(false);
        dist[src] = 0.0;
        loop {
            let mut u = none;
            let mut best = f64::INFINITY;
            for (x, &d) in dist.iter().enumerate() {
                if !done[x] && d < best {
                    best = d;
                    u = x;
                }
            }
            if u == none {
                break;
            }
            done[u] = true;
            let relax = |w: usize, c: f64, dist: &mut [f64], parent: &mut [usize]| {
                let nd = dist[u] + (c + pot[u] - pot[w]).max(0.0);
                if nd < dist[w] {
                    dist[w] = nd;
                    parent[w] = u;
                }
            };
            if u == src {
                for i in 0..m {
                    if rem_a[i] > 0 {
                        relax(i, 0.0, &mut dist, &mut parent);
                    }
                }
            } else if u < m {
                for j in 0..n {
                    relax(m + j, cost[[u, j]], &mut dist, &mut parent);
                }
            } else if u < sink {
                let j = u - m;
                for i in 0..m {
                    if flow[i * n + j] > 0 {
                        relax(i, -cost[[i, j]], &mut dist, &mut parent);
                    }
                }
                if rem_b[j] > 0 {
                    relax(sink, 0.0, &mut dist, &mut parent);
                }
            }
        }
        let reach = dist[sink];
        debug_assert!(reach.is_finite());
        for x in 0..v {
            pot[x] += dist[x].min(reach);
        }

        // walk back from the sink, collecting the bottleneck
        let mut amount = remaining;
        let mut x = sink;
        while x != src {
            let p = parent[x];
            amount = amount.min(if x == sink {
                rem_b[p - m]
            } else if p == src {
                rem_a[x]
            } else if x < m {
                flow[x * n + (p - m)]
            } else {
                i64::MAX
            });
            x = p;
        }
        let mut x = sink;
        while x != src {
            let p = parent[x];
            if x == sink {
                rem_b[p - m] -= amount;
            } else if p == src {
                rem_a[x] -= amount;
            } else if x < m {
                flow[x * n + (p - m)] -= amount;
            } else {
                flow[p * n + (x - m)] += amount;
            }
            x = p;
        }
        remaining -= amount;
    }
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..n {
            if flow[i * n + j] > 0 {
                total += flow[i * n + j] as f64 * cost[[i, j]];
            }
        }
    }
    total / WMD_QUANTUM as f64
}

/// Exact Word Mover's Distance with Euclidean ground cost.
pub fn wmd_exact<T: Real>(a: &NbowSignature<T>, b: &NbowSignature<T>) -> Result<f64> {
    let cost = ground_costs(a, b)?;
    Ok(transport(&quantize(&a.weights), &quantize(&b.weights), &cost))
}

/// Lower bound on [`wmd_exact`]: the larger of the two relaxations in which
/// each side's mass moves entirely to its nearest counterpart. Masses are
/// quantized exactly as for the exact solver.
pub fn wmd_relaxed<T: Real>(a: &NbowSignature<T>, b: &NbowSignature<T>) -> Result<f64> {
    let cost = ground_costs(a, b)?;
    let one_sided = |lines: ndarray::iter::Lanes<'_, f64, ndarray::Ix1>, mass: Vec<i64>| -> f64 {
        lines
            .into_iter()
            .zip(mass)
            .map(|(line, q)| q as f64 * line.iter().copied().fold(f64::INFINITY, f64::min))
            .sum::<f64>()
            / WMD_QUANTUM as f64
    };
    let forward = one_sided(cost.rows(), quantize(&a.weights));
    let backward = one_sided(cost.columns(), quantize(&b.weights));
    Ok(forward.max(backward))
}
