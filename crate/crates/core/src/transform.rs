//! Per-layer dynamics transformation.
//!
//! A layer with vertex biases `b` and delays `tau` runs the walk generated
//! by `(D' - A')(D' T)^{-1}`, where `A'` is the bias-reweighted adjacency and
//! `D'` its out-degrees. The same walk is the unbiased random walk on the
//! interaction matrix `W = A' + (T - I) D'`: biases become edge weights and
//! delays become self-loops.

use std::collections::BTreeMap;

use sprs::CsMat;
use thiserror::Error;

use crate::graph::LayerGraph;
use crate::markov::{urw_transition, MarkovError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("expected {expected} entries, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("reweighted entry ({u}, {v}) is negative")]
    NegativeEntry { u: usize, v: usize },
    #[error("parameter at vertex {vertex} is not finite")]
    NonFinite { vertex: usize },
    #[error("delay at vertex {vertex} is {tau}, must be >= 1")]
    DelayBelowOne { vertex: usize, tau: f64 },
    #[error(transparent)]
    Markov(#[from] MarkovError),
}

/// Bias and delay diagonals of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsParams {
    pub bias: Vec<f64>,
    pub delay: Vec<f64>,
}

impl DynamicsParams {
    /// Unbiased walk with the reference clock everywhere.
    pub fn identity(n: usize) -> Self {
        Self { bias: vec![1.0; n], delay: vec![1.0; n] }
    }

    pub fn new(bias: Vec<f64>, delay: Vec<f64>) -> Result<Self, TransformError> {
        if bias.len() != delay.len() {
            return Err(TransformError::DimensionMismatch { expected: bias.len(), actual: delay.len() });
        }
        check_delay(&delay)?;
        if let Some(vertex) = bias.iter().position(|b| !b.is_finite()) {
            return Err(TransformError::NonFinite { vertex });
        }
        Ok(Self { bias, delay })
    }

    /// Delay proportional to degree, `tau_u = 1 + kappa * d_u`.
    pub fn degree_delay(g: &LayerGraph, kappa: f64) -> Self {
        let delay = g.out_degrees().into_iter().map(|d| 1.0 + kappa * d).collect();
        Self { bias: vec![1.0; g.n()], delay }
    }

    pub fn n(&self) -> usize {
        self.bias.len()
    }
}

/// A transformed layer whose unbiased walk realizes the layer's dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix {
    pub graph: LayerGraph,
    /// Out-degrees `d'` of the bias-reweighted adjacency, before delay loops.
    pub reweighted_degrees: Vec<f64>,
}

impl InteractionMatrix {
    /// Treats `g` as already transformed (unit bias, unit delay).
    pub fn untransformed(g: LayerGraph) -> Self {
        let reweighted_degrees = g.out_degrees();
        Self { graph: g, reweighted_degrees }
    }
}

impl AsRef<LayerGraph> for InteractionMatrix {
    fn as_ref(&self) -> &LayerGraph {
        &self.graph
    }
}

/// Reweights a layer by vertex biases.
///
/// A bias favours its vertex as a walk *target*: directed layers become
/// `a'_uv = a_uv * b_v`, undirected layers `a'_uv = b_u * a_uv * b_v`.
pub fn bias_transform(g: &LayerGraph, bias: &[f64]) -> Result<LayerGraph, TransformError> {
    if bias.len() != g.n() {
        return Err(TransformError::DimensionMismatch { expected: g.n(), actual: bias.len() });
    }
    if let Some(vertex) = bias.iter().position(|b| !b.is_finite()) {
        return Err(TransformError::NonFinite { vertex });
    }
    let directed = g.is_directed();
    let mut entries = BTreeMap::new();
    for (u, v, a) in g.entries() {
        // b_u * b_v is commutative, which keeps undirected output exactly symmetric.
        let factor = if directed { bias[v] } else { bias[u] * bias[v] };
        let w = a * factor;
        if w < 0.0 {
            return Err(TransformError::NegativeEntry { u, v });
        }
        if w > 0.0 {
            entries.insert((u, v), w);
        }
    }
    Ok(LayerGraph::from_sorted(g.n(), directed, entries))
}

/// Absorbs delays as self-loops: `W = A' + (T - I) D'`.
pub fn delay_transform(g_prime: &LayerGraph, delay: &[f64]) -> Result<InteractionMatrix, TransformError> {
    let n = g_prime.n();
    if delay.len() != n {
        return Err(TransformError::DimensionMismatch { expected: n, actual: delay.len() });
    }
    check_delay(delay)?;
    let degrees = g_prime.out_degrees();
    let mut entries: BTreeMap<(usize, usize), f64> = g_prime.entries().map(|(u, v, w)| ((u, v), w)).collect();
    for (u, (&tau, &d)) in delay.iter().zip(&degrees).enumerate() {
        let extra = (tau - 1.0) * d;
        if extra > 0.0 {
            *entries.entry((u, u)).or_insert(0.0) += extra;
        }
    }
    Ok(InteractionMatrix {
        graph: LayerGraph::from_sorted(n, g_prime.is_directed(), entries),
        reweighted_degrees: degrees,
    })
}

/// Bias then delay.
pub fn transform_layer(g: &LayerGraph, params: &DynamicsParams) -> Result<InteractionMatrix, TransformError> {
    if params.n() != g.n() {
        return Err(TransformError::DimensionMismatch { expected: g.n(), actual: params.n() });
    }
    delay_transform(&bias_transform(g, &params.bias)?, &params.delay)
}

/// Random-walk Laplacian `(D_w - W^T) D_w^{-1} = I - M_W` in compressed-column form.
///
/// Entry `(v, u)` is `delta_uv - w_uv / d_u`.
pub fn laplacian_of(w: &InteractionMatrix) -> Result<CsMat<f64>, TransformError> {
    let m = urw_transition(&w.graph)?;
    let n = m.n();
    let mut indptr = vec![0];
    let mut indices = Vec::new();
    let mut data = Vec::new();
    for u in 0..n {
        let mut col: BTreeMap<usize, f64> = m.column(u).map(|(v, p)| (v, -p)).collect();
        *col.entry(u).or_insert(0.0) += 1.0;
        for (v, x) in col {
            indices.push(v);
            data.push(x);
        }
        indptr.push(indices.len());
    }
    Ok(CsMat::new_csc((n, n), indptr, indices, data))
}

fn check_delay(delay: &[f64]) -> Result<(), TransformError> {
    for (vertex, &tau) in delay.iter().enumerate() {
        if !tau.is_finite() {
            return Err(TransformError::NonFinite { vertex });
        }
        if tau < 1.0 {
            return Err(TransformError::DelayBelowOne { vertex, tau });
        }
    }
    Ok(())
}
