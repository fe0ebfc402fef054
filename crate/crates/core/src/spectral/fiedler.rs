use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{undirected_view, SpectralError};
use crate::graph::LayerGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EigenOptions {
    /// Bound on `||L x - lambda x||_2`.
    pub tol: f64,
    pub max_iter: usize,
    /// Seed of the random start vector.
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 100_000, seed: 42 }
    }
}

/// Second-smallest eigenpair of the normalized Laplacian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiedlerPair {
    pub value: f64,
    /// Unit vector orthogonal to `D^{1/2} 1`, first significant entry positive.
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Power iteration on `2I - L = I + D^{-1/2} W D^{-1/2}` deflated against
/// the null vector `D^{1/2} 1`.
///
/// The shifted operator is positive semidefinite with top eigenvalue 2 on
/// the null vector, so after deflation the dominant eigenvalue is `2 - lambda_2`.
pub fn fiedler_vector(g: &LayerGraph, opts: &EigenOptions) -> Result<FiedlerPair, SpectralError> {
    let g = undirected_view(g);
    let n = g.n();
    if n < 2 {
        return Err(SpectralError::TooSmall(n));
    }
    let components = g.components();
    if components.len() > 1 {
        return Err(SpectralError::Disconnected { components });
    }
    let inv_sqrt: Vec<f64> = g.out_degrees().iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut null: Vec<f64> = inv_sqrt.iter().map(|s| 1.0 / s).collect();
    normalize(&mut null);

    let shifted = |x: &[f64], y: &mut [f64]| {
        for u in 0..n {
            let acc: f64 = g.out_edges(u).map(|(v, w)| w * inv_sqrt[v] * x[v]).sum();
            y[u] = x[u] + inv_sqrt[u] * acc;
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    deflate(&mut x, &null);
    normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 1..=opts.max_iter {
        shifted(&x, &mut y);
        deflate(&mut y, &null);
        let mu = dot(&x, &y);
        residual = y.iter().zip(&x).map(|(a, b)| (a - mu * b).powi(2)).sum::<f64>().sqrt();
        if residual <= opts.tol {
            fix_sign(&mut x);
            return Ok(FiedlerPair { value: 2.0 - mu, vector: x, residual, iterations: iteration });
        }
        std::mem::swap(&mut x, &mut y);
        normalize(&mut x);
    }
    Err(SpectralError::NoConvergence { iterations: opts.max_iter, residual })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let norm = dot(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}

fn deflate(x: &mut [f64], unit: &[f64]) {
    let c = dot(x, unit);
    x.iter_mut().zip(unit).for_each(|(v, u)| *v -= c * u);
}

fn fix_sign(x: &mut [f64]) {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-6 * scale) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}
