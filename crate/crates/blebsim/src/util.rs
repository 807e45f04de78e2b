//! Small numeric helpers shared across modules.

use rayon::prelude::*;

/// Chunk size for deterministic parallel reductions.
const CHUNK: usize = 4096;

/// Sum of a slice with a thread-count-independent result: partial sums are
/// taken over fixed chunks and combined in index order.
pub fn chunk_sum(values: &[f64]) -> f64 {
    let partials: Vec<f64> = values
        .par_chunks(CHUNK)
        .map(|c| c.iter().sum::<f64>())
        .collect();
    partials.iter().sum()
}

/// Deterministic parallel sum of `f(i)` for `i in 0..n`.
pub fn chunk_sum_with(n: usize, f: impl Fn(usize) -> f64 + Sync) -> f64 {
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            acc
        })
        .collect();
    partials.iter().sum()
}

/// Least-squares slope of `log(err)` against `log(x)`; the observed
/// convergence order of a refinement sequence.
pub fn fitted_order(xs: &[f64], errs: &[f64]) -> f64 {
    assert_eq!(xs.len(), errs.len());
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(errs)
        .filter(|(_, e)| **e > 0.0)
        .map(|(x, e)| (x.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// 3-vector helpers used by the geometry and oracle code.
pub mod vec3 {
    pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    pub fn norm(a: [f64; 3]) -> f64 {
        dot(a, a).sqrt()
    }

    pub fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    pub fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    pub fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
        [a[0] * s, a[1] * s, a[2] * s]
    }

    pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    pub fn normalize(a: [f64; 3]) -> [f64; 3] {
        let n = norm(a);
        scale(a, 1.0 / n)
    }
}
