//! Inter-layer composition: assembling transformed layers into one
//! `ln x ln` super-adjacency.
//!
//! Flat indices are layer-major, `flat = layer * n + vertex`, so every layer
//! occupies a contiguous diagonal block. Inter-layer edges only ever join
//! two instances of the same vertex, so each off-diagonal block is a
//! diagonal matrix and is stored as a length-`n` vector.

mod distance;
mod ego;
mod stationary;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{GraphError, LayerGraph};

pub use distance::{compose_distance, temporal_distances, DistanceCoupling, DistanceKernel};
pub use ego::{
    check_undirected_feasibility, compose_ego, ego_block, EgoBlock, EgoMarkov, EgoOptions, FeasibilityReport,
};
pub use stationary::{
    compose_stationary, ego_block_at_scale, ego_block_from_stationary, stationary_scale_range, two_layer_coupling,
};
pub use verify::{
    verify_ego_consistency, verify_layer_consistency, EgoConsistencyReport, LayerConsistencyReport, LayerDeviation,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComposeError {
    #[error("composition needs at least one layer")]
    NoLayers,
    #[error("{what}: expected {expected}, got {actual}")]
    DimensionMismatch { what: &'static str, expected: usize, actual: usize },
    #[error("vertex {vertex}: ego matrix column {column} sums to {sum}")]
    NotStochastic { vertex: usize, column: usize, sum: f64 },
    #[error("vertex {vertex}: ego matrix has an entry outside [0, 1]")]
    OutOfRange { vertex: usize },
    #[error("vertex {vertex}: staying probability in layer {layer} is zero")]
    ZeroDiagonal { vertex: usize, layer: usize },
    #[error("vertex {vertex}: switches through layer {layer} where it has zero degree")]
    ZeroDegree { vertex: usize, layer: usize },
    #[error("no ego matrix for vertex {0}")]
    MissingEgo(usize),
    #[error("more than one ego matrix for vertex {0}")]
    DuplicateEgo(usize),
    #[error("undirected composition infeasible at {} vertices (worst asymmetry {worst:e})", vertices.len())]
    AsymmetricEgo { vertices: Vec<usize>, worst: f64 },
    #[error("vertex {vertex}: layer distribution must be positive and sum to 1")]
    InvalidDistribution { vertex: usize },
    #[error("vertex {vertex}: stationary target infeasible ({reason})")]
    Infeasible { vertex: usize, reason: String, interval: Option<(f64, f64)> },
    #[error("vertex {vertex}: pi = 0.5 with unequal degrees has no finite coupling")]
    Degenerate { vertex: usize },
    #[error("vertex {vertex}: pi = 0.5 with equal degrees leaves the coupling free")]
    Underdetermined { vertex: usize },
    #[error("vertex {vertex}: proportional fitting did not converge")]
    NoConvergence { vertex: usize },
    #[error("layer {0} is directed; this composition needs undirected layers")]
    DirectedLayer(usize),
    #[error("instance of vertex {vertex} in layer {layer} has zero out-weight")]
    IsolatedInstance { vertex: usize, layer: usize },
    #[error("distance matrix is not symmetric at ({i}, {j})")]
    AsymmetricDistance { i: usize, j: usize },
    #[error("distance ({i}, {j}) is invalid")]
    InvalidDistance { i: usize, j: usize },
    #[error("coupling must be positive, got {0}")]
    NonPositiveCoupling(f64),
    #[error("entry ({from}, {to}) couples different vertices")]
    NotDiagonalCoupling { from: usize, to: usize },
    #[error("inter-layer weight at vertex {vertex} ({from} -> {to}) is invalid")]
    InvalidInterWeight { vertex: usize, from: usize, to: usize },
    #[error("{}", PerVertex(.0))]
    PerVertex(Vec<(usize, ComposeError)>),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

struct PerVertex<'a>(&'a [(usize, ComposeError)]);

impl fmt::Display for PerVertex<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} vertices failed", self.0.len())?;
        for (vertex, err) in self.0.iter().take(5) {
            write!(f, "; {vertex}: {err}")?;
        }
        Ok(())
    }
}

/// The composed `ln x ln` weighted super-adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperAdjacency {
    n: usize,
    l: usize,
    layers: Vec<LayerGraph>,
    /// `inter[(from * l + to) * n + u]`: weight of `(u, from) -> (u, to)`.
    inter: Vec<f64>,
}

impl SuperAdjacency {
    /// Layers side by side with no inter-layer edges.
    pub fn block_diagonal(layers: Vec<LayerGraph>) -> Result<Self, ComposeError> {
        let n = common_n(&layers)?;
        let l = layers.len();
        Ok(Self { n, l, layers, inter: vec![0.0; l * l * n] })
    }

    /// Assembles from diagonal blocks and `inter[from][to][u]` weights.
    pub fn from_parts(layers: Vec<LayerGraph>, inter: &[Vec<Vec<f64>>]) -> Result<Self, ComposeError> {
        let mut s = Self::block_diagonal(layers)?;
        if inter.len() != s.l {
            return Err(ComposeError::DimensionMismatch { what: "inter blocks", expected: s.l, actual: inter.len() });
        }
        for (from, row) in inter.iter().enumerate() {
            if row.len() != s.l {
                return Err(ComposeError::DimensionMismatch { what: "inter blocks", expected: s.l, actual: row.len() });
            }
            for (to, weights) in row.iter().enumerate() {
                if weights.len() != s.n {
                    return Err(ComposeError::DimensionMismatch {
                        what: "inter block length",
                        expected: s.n,
                        actual: weights.len(),
                    });
                }
                for (u, &w) in weights.iter().enumerate() {
                    if from == to && w != 0.0 {
                        return Err(ComposeError::InvalidInterWeight { vertex: u, from, to });
                    }
                    if from != to {
                        s.set_inter(u, from, to, w)?;
                    }
                }
            }
        }
        Ok(s)
    }

    /// Splits a flat layer-major `ln x ln` graph back into blocks.
    ///
    /// `directed[i]` gives the orientation of layer `i`.
    pub fn from_graph(flat: &LayerGraph, n: usize, directed: &[bool]) -> Result<Self, ComposeError> {
        let l = directed.len();
        if flat.n() != n * l {
            return Err(ComposeError::DimensionMismatch { what: "flat size", expected: n * l, actual: flat.n() });
        }
        let mut blocks: Vec<BTreeMap<(usize, usize), f64>> = vec![BTreeMap::new(); l];
        let mut inter = vec![0.0; l * l * n];
        for (a, b, w) in flat.entries() {
            let (u, i) = (a % n, a / n);
            let (v, j) = (b % n, b / n);
            if i == j {
                blocks[i].insert((u, v), w);
            } else if u == v {
                inter[(i * l + j) * n + u] = w;
            } else {
                return Err(ComposeError::NotDiagonalCoupling { from: a, to: b });
            }
        }
        let layers = blocks
            .into_iter()
            .zip(directed)
            .map(|(block, &d)| LayerGraph::from_entries(n, d, block.into_iter().map(|((u, v), w)| (u, v, w))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { n, l, layers, inter })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn layers(&self) -> &[LayerGraph] {
        &self.layers
    }

    pub fn layer(&self, i: usize) -> &LayerGraph {
        &self.layers[i]
    }

    /// Weight of the inter-layer edge `(u, from) -> (u, to)`.
    pub fn inter_weight(&self, u: usize, from: usize, to: usize) -> f64 {
        self.inter[(from * self.l + to) * self.n + u]
    }

    /// Diagonal of the off-diagonal block `(from, to)`.
    pub fn inter_block(&self, from: usize, to: usize) -> &[f64] {
        let start = (from * self.l + to) * self.n;
        &self.inter[start..start + self.n]
    }

    /// Sets the inter-layer weight `(u, from) -> (u, to)`.
    pub fn set_inter(&mut self, u: usize, from: usize, to: usize, w: f64) -> Result<(), ComposeError> {
        if !w.is_finite() || w < 0.0 || (from == to && w != 0.0) {
            return Err(ComposeError::InvalidInterWeight { vertex: u, from, to });
        }
        self.inter[(from * self.l + to) * self.n + u] = w;
        Ok(())
    }

    pub fn flat_index(&self, vertex: usize, layer: usize) -> usize {
        layer * self.n + vertex
    }

    /// `(vertex, layer)` of a flat index.
    pub fn instance(&self, flat: usize) -> (usize, usize) {
        (flat % self.n, flat / self.n)
    }

    /// Flat indices listed vertex-major: position `u * l + i` holds the flat
    /// index of `(u, i)`, grouping the instances of each vertex together.
    pub fn vertex_major_order(&self) -> Vec<usize> {
        (0..self.n).flat_map(|u| (0..self.l).map(move |i| i * self.n + u)).collect()
    }

    /// Flat indices of instances with at least one incident edge, ascending.
    /// Absent instances of a vertex are isolated and can be dropped before
    /// analyses that need a connected graph.
    pub fn active_instances(&self) -> Vec<usize> {
        let flat = self.to_graph();
        let (out, inc) = (flat.out_degrees(), flat.in_degrees());
        (0..flat.n()).filter(|&k| out[k] > 0.0 || inc[k] > 0.0).collect()
    }

    /// Directed when any layer is, or when some inter-layer pair is asymmetric.
    pub fn is_directed(&self) -> bool {
        self.layers.iter().any(LayerGraph::is_directed)
            || (0..self.l).any(|i| {
                (i + 1..self.l).any(|j| self.inter_block(i, j) != self.inter_block(j, i))
            })
    }

    /// Total out-weight of instance `(u, i)`, inter-layer edges included.
    pub fn instance_out_degree(&self, u: usize, i: usize) -> f64 {
        self.layers[i].out_degree(u) + (0..self.l).map(|j| self.inter_weight(u, i, j)).sum::<f64>()
    }

    /// `degrees[u][i]`: out-degree of `u` inside layer `i`.
    pub fn layer_degrees(&self) -> Vec<Vec<f64>> {
        layer_degrees(&self.layers)
    }

    /// Number of stored non-zero weights.
    pub fn nnz(&self) -> usize {
        self.layers.iter().map(LayerGraph::nnz).sum::<usize>() + self.inter.iter().filter(|&&w| w != 0.0).count()
    }

    /// Copy with layer `i`'s diagonal block scaled by `factor`.
    pub fn with_layer_scaled(&self, i: usize, factor: f64) -> Self {
        let mut s = self.clone();
        s.layers[i] = s.layers[i].scaled(factor);
        s
    }

    /// The flat layer-major graph.
    pub fn to_graph(&self) -> LayerGraph {
        let n = self.n;
        let mut entries = BTreeMap::new();
        for (i, layer) in self.layers.iter().enumerate() {
            for (u, v, w) in layer.entries() {
                entries.insert((i * n + u, i * n + v), w);
            }
        }
        for from in 0..self.l {
            for to in 0..self.l {
                for (u, &w) in self.inter_block(from, to).iter().enumerate() {
                    if w != 0.0 {
                        entries.insert((from * n + u, to * n + u), w);
                    }
                }
            }
        }
        LayerGraph::from_sorted(n * self.l, self.is_directed(), entries)
    }
}

/// Composition regime and its inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum CompositionSpec {
    Multiplex,
    Ego(Vec<EgoMarkov>),
    /// Per-vertex layer distribution; `None` leaves the vertex uncoupled.
    Stationary(Vec<Option<Vec<f64>>>),
    Distance(DistanceCoupling),
}

/// Runs the requested composition. Multiplex output is a one-layer
/// super-adjacency holding the summed graph.
pub fn compose<L: AsRef<LayerGraph>>(layers: &[L], spec: &CompositionSpec) -> Result<SuperAdjacency, ComposeError> {
    match spec {
        CompositionSpec::Multiplex => SuperAdjacency::block_diagonal(vec![compose_multiplex(layers)?]),
        CompositionSpec::Ego(egos) => compose_ego(layers, egos, &EgoOptions::default()),
        CompositionSpec::Stationary(pis) => compose_stationary(layers, pis),
        CompositionSpec::Distance(coupling) => compose_distance(layers, coupling),
    }
}

/// Entrywise sum of the layers as one `n x n` graph.
pub fn compose_multiplex<L: AsRef<LayerGraph>>(layers: &[L]) -> Result<LayerGraph, ComposeError> {
    let graphs: Vec<&LayerGraph> = layers.iter().map(AsRef::as_ref).collect();
    let n = common_n(&graphs)?;
    if graphs.len() == 1 {
        return Ok(graphs[0].clone());
    }
    let mut entries: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for g in &graphs {
        for (u, v, w) in g.entries() {
            *entries.entry((u, v)).or_insert(0.0) += w;
        }
    }
    let directed = graphs.iter().any(|g| g.is_directed());
    Ok(LayerGraph::from_sorted(n, directed, entries))
}

/// `degrees[u][i]`: out-degree of `u` in layer `i`.
pub fn layer_degrees<L: AsRef<LayerGraph>>(layers: &[L]) -> Vec<Vec<f64>> {
    let per_layer: Vec<Vec<f64>> = layers.iter().map(|g| g.as_ref().out_degrees()).collect();
    let n = per_layer.first().map_or(0, Vec::len);
    (0..n).map(|u| per_layer.iter().map(|d| d[u]).collect()).collect()
}

pub(crate) fn common_n<L: AsRef<LayerGraph>>(layers: &[L]) -> Result<usize, ComposeError> {
    let first = layers.first().ok_or(ComposeError::NoLayers)?.as_ref().n();
    for g in layers {
        let n = g.as_ref().n();
        if n != first {
            return Err(ComposeError::DimensionMismatch { what: "layer size", expected: first, actual: n });
        }
    }
    Ok(first)
}
