//! Composition from pairwise layer distances.
//!
//! With distances as the only inter-layer input every vertex gets the same
//! slice, and the coupling constant is the single remaining degree of
//! freedom: it sets inter-layer strength relative to intra-layer weights.

use super::{common_n, ComposeError, SuperAdjacency};
use crate::graph::LayerGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceKernel {
    /// `w = c / dist`.
    #[default]
    Reciprocal,
    /// `w = c` for every coupled pair.
    Constant,
}

impl DistanceKernel {
    fn weight(self, coupling: f64, dist: f64) -> f64 {
        match self {
            DistanceKernel::Reciprocal => coupling / dist,
            DistanceKernel::Constant => coupling,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceCoupling {
    /// Symmetric `l x l` distances with zero diagonal.
    pub distances: Vec<Vec<f64>>,
    pub coupling: f64,
    pub kernel: DistanceKernel,
    /// Couple only layers `i` and `i + 1`.
    pub adjacent_only: bool,
}

impl DistanceCoupling {
    /// Temporal stack: unit spacing, neighbouring layers only.
    pub fn temporal(l: usize, coupling: f64) -> Self {
        Self { distances: temporal_distances(l), coupling, kernel: DistanceKernel::Reciprocal, adjacent_only: true }
    }
}

/// `|i - j|`, the distances of equally spaced snapshots.
pub fn temporal_distances(l: usize) -> Vec<Vec<f64>> {
    (0..l).map(|i| (0..l).map(|j| i.abs_diff(j) as f64).collect()).collect()
}

/// Couples every vertex present (positive out-degree) in both layers of a
/// pair with weight `kernel(c, dist)` in both directions.
pub fn compose_distance<L: AsRef<LayerGraph>>(
    layers: &[L],
    spec: &DistanceCoupling,
) -> Result<SuperAdjacency, ComposeError> {
    let n = common_n(layers)?;
    let l = layers.len();
    let dist = &spec.distances;
    if dist.len() != l || dist.iter().any(|row| row.len() != l) {
        return Err(ComposeError::DimensionMismatch { what: "distance matrix", expected: l, actual: dist.len() });
    }
    if !(spec.coupling.is_finite() && spec.coupling > 0.0) {
        return Err(ComposeError::NonPositiveCoupling(spec.coupling));
    }
    for (i, row) in dist.iter().enumerate() {
        if row[i] != 0.0 {
            return Err(ComposeError::InvalidDistance { i, j: i });
        }
        if let Some(j) = (0..i).find(|&j| row[j] != dist[j][i]) {
            return Err(ComposeError::AsymmetricDistance { i, j });
        }
    }

    let present: Vec<Vec<bool>> = layers
        .iter()
        .map(|g| g.as_ref().out_degrees().into_iter().map(|d| d > 0.0).collect())
        .collect();
    let mut s = SuperAdjacency::block_diagonal(layers.iter().map(|g| g.as_ref().clone()).collect())?;
    for i in 0..l {
        for j in 0..l {
            if i == j || (spec.adjacent_only && i.abs_diff(j) != 1) {
                continue;
            }
            let d = dist[i][j];
            if !(d.is_finite() && d > 0.0) {
                return Err(ComposeError::InvalidDistance { i, j });
            }
            let w = spec.kernel.weight(spec.coupling, d);
            for u in (0..n).filter(|&u| present[i][u] && present[j][u]) {
                s.set_inter(u, i, j, w)?;
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stack() -> Vec<LayerGraph> {
        (0..3).map(|_| LayerGraph::from_edges(2, false, [(0, 1, 1.0)]).unwrap()).collect()
    }

    #[test]
    fn temporal_coupling_weights() {
        for c in [0.5, 5.0] {
            let s = compose_distance(&stack(), &DistanceCoupling::temporal(3, c)).unwrap();
            assert_eq!(s.inter_weight(0, 0, 1), c);
            assert_eq!(s.inter_weight(1, 2, 1), c);
            assert_eq!(s.inter_weight(0, 0, 2), 0.0);
            assert!(!s.is_directed());
        }
    }

    #[test]
    fn reciprocal_all_pairs() {
        let spec = DistanceCoupling { adjacent_only: false, ..DistanceCoupling::temporal(3, 1.0) };
        let s = compose_distance(&stack(), &spec).unwrap();
        assert_eq!(s.inter_weight(0, 0, 2), 0.5);
        assert_eq!(s.inter_weight(0, 0, 1), 1.0);
    }

    #[test]
    fn absent_vertices_are_not_coupled() {
        let layers = [
            LayerGraph::from_edges(3, false, [(0, 1, 1.0)]).unwrap(),
            LayerGraph::from_edges(3, false, [(0, 2, 1.0)]).unwrap(),
        ];
        let s = compose_distance(&layers, &DistanceCoupling::temporal(2, 1.0)).unwrap();
        assert_eq!(s.inter_block(0, 1), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn validation_errors() {
        let mut spec = DistanceCoupling::temporal(3, 1.0);
        spec.coupling = 0.0;
        assert_eq!(compose_distance(&stack(), &spec), Err(ComposeError::NonPositiveCoupling(0.0)));
        let mut spec = DistanceCoupling::temporal(3, 1.0);
        spec.distances[0][1] = 2.0;
        assert_eq!(compose_distance(&stack(), &spec), Err(ComposeError::AsymmetricDistance { i: 1, j: 0 }));
        let mut spec = DistanceCoupling::temporal(3, 1.0);
        spec.distances[1][1] = 1.0;
        assert_eq!(compose_distance(&stack(), &spec), Err(ComposeError::InvalidDistance { i: 1, j: 1 }));
    }
}
