//! Parallel reductions with a fixed summation order.

use rayon::prelude::*;

const CHUNK: usize = 4096;

/// Σ f(i) for i in 0..n, bit-identical for any thread count.
pub(crate) fn sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partial: Vec<f64> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(n)).map(&f).sum())
        .collect();
    partial.iter().sum()
}

/// Component-wise Σ f(i) of fixed-size arrays.
pub(crate) fn sum_array<const K: usize, F>(n: usize, f: F) -> [f64; K]
where
    F: Fn(usize) -> [f64; K] + Sync,
{
    let partial: Vec<[f64; K]> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = [0.0; K];
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                for (a, v) in acc.iter_mut().zip(f(i)) {
                    *a += v;
                }
            }
            acc
        })
        .collect();
    partial.iter().fold([0.0; K], |mut acc, p| {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
        acc
    })
}
