//! Spectral analysis of composed networks: Fiedler vector, sweep bisection,
//! conductance and per-layer load.
//!
//! Everything here works on a symmetric weight matrix. Directed inputs are
//! replaced by `(W + W^T) / 2` with a warning.

mod fiedler;
mod load;
mod sweep;

pub use fiedler::{fiedler_vector, EigenOptions, FiedlerPair};
pub use load::{layer_load, scale_for_layer_load, LayerLoad};
pub use sweep::{bisect, conductance, cut_weight, fiedler_order, one_sided_conductance, sweep_cut, Bisection, ConductanceVariant};

use std::borrow::Cow;

use thiserror::Error;

use crate::graph::LayerGraph;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("graph is disconnected ({} components)", .components.len())]
    Disconnected { components: Vec<Vec<usize>> },
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("graph needs at least two vertices, got {0}")]
    TooSmall(usize),
    #[error("one side of the partition is empty")]
    EmptySide,
    #[error("order is not a permutation of 0..{0}")]
    InvalidOrder(usize),
    #[error("side vector has length {actual}, expected {expected}")]
    SideLength { expected: usize, actual: usize },
    #[error("total volume is zero")]
    EmptyGraph,
    #[error("layer {layer} has zero intra-layer volume")]
    EmptyLayer { layer: usize },
    #[error("target load {0} is outside (0, 1)")]
    InvalidTarget(f64),
    #[error("target load {target} is unreachable by scaling layer {layer}")]
    Unreachable { layer: usize, target: f64 },
}

/// The graph itself if symmetric, else `(W + W^T) / 2`.
pub(crate) fn undirected_view(g: &LayerGraph) -> Cow<'_, LayerGraph> {
    if g.is_directed() && !g.is_symmetric() {
        log::warn!("directed graph symmetrized as (W + W^T)/2 for spectral analysis");
        Cow::Owned(g.symmetrized())
    } else {
        Cow::Borrowed(g)
    }
}
