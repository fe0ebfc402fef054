//! Consistency checks of a composed super-adjacency against its inputs.
//!
//! Both checks read the joint walk off the flat graph, so they see exactly
//! what a downstream random-walk analysis would see.

use serde::Serialize;

use super::ego::order_egos;
use super::{ComposeError, SuperAdjacency};
use crate::graph::LayerGraph;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerDeviation {
    pub layer: usize,
    pub max_deviation: f64,
    /// `(from, to)` vertex pair of the largest deviation.
    pub at: Option<(usize, usize)>,
}

/// Layer consistency: each layer's walk is the projection of the joint walk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerConsistencyReport {
    pub layers: Vec<LayerDeviation>,
    pub tol: f64,
    pub passed: bool,
}

/// Ego consistency: each vertex's layer marginal of the joint walk is its ego matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EgoConsistencyReport {
    /// Largest entrywise deviation per vertex.
    pub deviations: Vec<f64>,
    pub failing: Vec<usize>,
    pub tol: f64,
    pub passed: bool,
}

impl EgoConsistencyReport {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }
}

/// Compares the stochastic normalization of every diagonal block of the
/// joint walk with the unbiased walk of the corresponding input layer.
pub fn verify_layer_consistency<L: AsRef<LayerGraph>>(
    s: &SuperAdjacency,
    layers: &[L],
    tol: f64,
) -> Result<LayerConsistencyReport, ComposeError> {
    if layers.len() != s.l() {
        return Err(ComposeError::DimensionMismatch { what: "layers", expected: s.l(), actual: layers.len() });
    }
    let n = s.n();
    let flat = s.to_graph();
    let mut report = Vec::with_capacity(s.l());
    for (i, input) in layers.iter().enumerate() {
        let input = input.as_ref();
        if input.n() != n {
            return Err(ComposeError::DimensionMismatch { what: "layer size", expected: n, actual: input.n() });
        }
        let mut dev = LayerDeviation { layer: i, max_deviation: 0.0, at: None };
        for u in 0..n {
            let k = i * n + u;
            let total = flat.out_degree(k);
            // Principal block column of M_W, then its stochastic normalization.
            let block: Vec<(usize, f64)> = flat
                .out_edges(k)
                .filter(|&(t, _)| t / n == i)
                .map(|(t, w)| (t % n, w / total))
                .collect();
            let block_mass: f64 = block.iter().map(|(_, p)| p).sum();
            let projected: Vec<(usize, f64)> = block.iter().map(|&(v, p)| (v, p / block_mass)).collect();
            let d = input.out_degree(u);
            let expected: Vec<(usize, f64)> = input.out_edges(u).map(|(v, w)| (v, w / d)).collect();
            for (v, gap) in column_gaps(&projected, &expected) {
                if gap > dev.max_deviation {
                    dev.max_deviation = gap;
                    dev.at = Some((u, v));
                }
            }
        }
        report.push(dev);
    }
    let passed = report.iter().all(|d| d.max_deviation <= tol);
    Ok(LayerConsistencyReport { layers: report, tol, passed })
}

/// Compares `Q_v + M_{W_v} (I - Q_v)` with `M_v` for every vertex.
///
/// `q_{v,i}` is the probability of staying in layer `i` from `(v, i)`,
/// self-loops included. `M_{W_v}` normalizes the inter-layer part of the
/// vertical slice only; intra-layer moves are already counted in `Q_v`.
pub fn verify_ego_consistency(
    s: &SuperAdjacency,
    egos: &[super::EgoMarkov],
    tol: f64,
) -> Result<EgoConsistencyReport, ComposeError> {
    let (n, l) = (s.n(), s.l());
    let ordered = order_egos(egos, n, l)?;
    let flat = s.to_graph();
    let mut deviations = Vec::with_capacity(n);
    for (v, ego) in ordered.iter().enumerate() {
        let mut worst = 0.0f64;
        for i in 0..l {
            let k = i * n + v;
            let total = flat.out_degree(k);
            if total <= 0.0 {
                return Err(ComposeError::IsolatedInstance { vertex: v, layer: i });
            }
            let mut stay = 0.0;
            let mut switch = vec![0.0; l];
            for (t, w) in flat.out_edges(k) {
                let (u, j) = (t % n, t / n);
                if j == i {
                    stay += w / total;
                } else if u == v {
                    switch[j] += w / total;
                }
            }
            let switch_mass: f64 = switch.iter().sum();
            for (j, &sw) in switch.iter().enumerate() {
                let slice = if switch_mass > 0.0 { sw / switch_mass } else { 0.0 };
                let marginal = if i == j { stay } else { slice * (1.0 - stay) };
                worst = worst.max((marginal - ego.prob(i, j)).abs());
            }
        }
        deviations.push(worst);
    }
    let failing: Vec<usize> = deviations.iter().enumerate().filter(|(_, &d)| d > tol).map(|(v, _)| v).collect();
    Ok(EgoConsistencyReport { passed: failing.is_empty(), deviations, failing, tol })
}

/// `|p_v - q_v|` over the union of two sorted sparse columns.
fn column_gaps(a: &[(usize, f64)], b: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut gaps = Vec::with_capacity(a.len().max(b.len()));
    let (mut x, mut y) = (0, 0);
    while x < a.len() || y < b.len() {
        match (a.get(x), b.get(y)) {
            (Some(&(i, p)), Some(&(j, q))) if i == j => {
                gaps.push((i, (p - q).abs()));
                x += 1;
                y += 1;
            }
            (Some(&(i, p)), Some(&(j, _))) if i < j => {
                gaps.push((i, p.abs()));
                x += 1;
            }
            (Some(&(i, p)), None) => {
                gaps.push((i, p.abs()));
                x += 1;
            }
            (_, Some(&(j, q))) => {
                gaps.push((j, q.abs()));
                y += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    gaps
}
