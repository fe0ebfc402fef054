//! Random-walk transition operators on layer graphs.
//!
//! Transitions are column-stochastic: `M[v][u]` is the probability of
//! stepping `u -> v`, so a stationary distribution satisfies `M pi = pi`.

use sprs::CsMat;
use thiserror::Error;

use crate::graph::LayerGraph;

/// Tolerance for identities that hold up to rounding.
pub const STRUCTURAL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarkovError {
    #[error("vertex {0} has zero out-degree")]
    DanglingVertex(usize),
    #[error("scale factor at {index} is {value}, expected > 0")]
    NonPositiveScale { index: usize, value: f64 },
    #[error("expected a vector of length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("power iteration did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("chain is not detailed-balanced (max flow imbalance {imbalance:e})")]
    NotDetailedBalanced { imbalance: f64 },
    #[error("column {column} sums to {sum}, not 1")]
    NotStochastic { column: usize, sum: f64 },
}

/// Column-stochastic transition matrix in compressed-column storage.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    matrix: CsMat<f64>,
}

impl TransitionMatrix {
    /// Wraps a compressed-column matrix after checking every column sums to 1.
    pub fn from_csc(matrix: CsMat<f64>) -> Result<Self, MarkovError> {
        let matrix = if matrix.is_csc() { matrix } else { matrix.to_csc() };
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(MarkovError::DimensionMismatch { expected: rows, actual: cols });
        }
        for (column, col) in matrix.outer_iterator().enumerate() {
            let sum: f64 = col.data().iter().sum();
            let in_range = col.data().iter().all(|&p| (0.0..=1.0).contains(&p));
            if (sum - 1.0).abs() > STRUCTURAL_TOL || !in_range {
                return Err(MarkovError::NotStochastic { column, sum });
            }
        }
        Ok(Self { matrix })
    }

    /// Dense column-major input: `columns[u][v] = P(u -> v)`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self, MarkovError> {
        let n = columns.len();
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for col in columns {
            if col.len() != n {
                return Err(MarkovError::DimensionMismatch { expected: n, actual: col.len() });
            }
            for (v, &p) in col.iter().enumerate() {
                if p != 0.0 {
                    indices.push(v);
                    data.push(p);
                }
            }
            indptr.push(indices.len());
        }
        Self::from_csc(CsMat::new_csc((n, n), indptr, indices, data))
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    /// `P(from -> to)`.
    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.matrix.get(to, from).copied().unwrap_or(0.0)
    }

    /// Outgoing distribution of `from` as `(to, p)` pairs.
    pub fn column(&self, from: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.matrix.indptr().outer_inds_sz(from);
        let idx = &self.matrix.indices()[range.clone()];
        let val = &self.matrix.data()[range];
        idx.iter().copied().zip(val.iter().copied())
    }

    pub fn matrix(&self) -> &CsMat<f64> {
        &self.matrix
    }

    /// `y = M x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n()];
        for (u, col) in self.matrix.outer_iterator().enumerate() {
            let xu = x[u];
            if xu == 0.0 {
                continue;
            }
            for (v, &p) in col.iter() {
                y[v] += p * xu;
            }
        }
        y
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.matrix.outer_iterator().map(|c| c.data().iter().sum()).collect()
    }

    /// Row-major dense copy, `dense[v][u] = P(u -> v)`.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut dense = vec![vec![0.0; n]; n];
        for (u, col) in self.matrix.outer_iterator().enumerate() {
            for (v, &p) in col.iter() {
                dense[v][u] = p;
            }
        }
        dense
    }
}

/// A probability vector with `M pi = pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    pub pi: Vec<f64>,
    /// Uniform damping that was blended into the chain; zero unless the
    /// undamped iteration failed and the solver fell back.
    pub damping: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Weight of the uniform jump, in `[0, 1)`.
    pub damping: f64,
    /// Damping used for the single retry when the first run does not converge.
    pub fallback_damping: Option<f64>,
    /// Start vector; uniform when `None`.
    pub start: Option<Vec<f64>>,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100_000, damping: 0.0, fallback_damping: Some(0.15), start: None }
    }
}

/// Transition matrix of the unbiased random walk: `M[v][u] = a_uv / d_u`.
pub fn urw_transition(g: &LayerGraph) -> Result<TransitionMatrix, MarkovError> {
    let n = g.n();
    // Row u of the adjacency is column u of the transition matrix.
    let a = g.adjacency();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::with_capacity(a.nnz());
    let mut data = Vec::with_capacity(a.nnz());
    indptr.push(0);
    for (u, row) in a.outer_iterator().enumerate() {
        let degree: f64 = row.data().iter().sum();
        if degree <= 0.0 {
            return Err(MarkovError::DanglingVertex(u));
        }
        for (v, &w) in row.iter() {
            indices.push(v);
            data.push(w / degree);
        }
        indptr.push(indices.len());
    }
    Ok(TransitionMatrix { matrix: CsMat::new_csc((n, n), indptr, indices, data) })
}

/// The member `M Gamma` of the adjacency family of `m`: `a_uv = gamma_u * M[v][u]`.
pub fn reconstruct_adjacency(m: &TransitionMatrix, gamma: &[f64]) -> Result<LayerGraph, MarkovError> {
    let n = m.n();
    if gamma.len() != n {
        return Err(MarkovError::DimensionMismatch { expected: n, actual: gamma.len() });
    }
    if let Some((index, &value)) = gamma.iter().enumerate().find(|(_, &g)| !(g.is_finite() && g > 0.0)) {
        return Err(MarkovError::NonPositiveScale { index, value });
    }
    let entries = (0..n).flat_map(|u| m.column(u).map(move |(v, p)| (u, v, p * gamma[u])));
    let entries: Vec<_> = entries.collect();
    Ok(LayerGraph::from_entries(n, true, entries).expect("scaled stochastic entries are valid"))
}

/// Stationary distribution by power iteration on the lazy chain `(I + M) / 2`.
///
/// The lazy chain has the same fixed points as `M` and is aperiodic, so the
/// iteration also converges on bipartite graphs. Convergence is measured as
/// `||M pi - pi||_1` on the (possibly damped) operator. When the undamped run
/// exhausts `max_iter`, one retry with `fallback_damping` is made.
pub fn stationary(m: &TransitionMatrix, opts: &StationaryOptions) -> Result<StationaryDistribution, MarkovError> {
    match power_iteration(m, opts, opts.damping) {
        Err(MarkovError::NoConvergence { .. }) if opts.damping == 0.0 && opts.fallback_damping.is_some() => {
            let damping = opts.fallback_damping.unwrap_or_default();
            log::warn!("stationary solver did not converge undamped, retrying with damping {damping}");
            power_iteration(m, opts, damping)
        }
        other => other,
    }
}

fn power_iteration(
    m: &TransitionMatrix,
    opts: &StationaryOptions,
    damping: f64,
) -> Result<StationaryDistribution, MarkovError> {
    let n = m.n();
    if n == 0 {
        return Ok(StationaryDistribution { pi: Vec::new(), damping, iterations: 0, residual: 0.0 });
    }
    let mut x = match &opts.start {
        Some(start) if start.len() != n => {
            return Err(MarkovError::DimensionMismatch { expected: n, actual: start.len() })
        }
        Some(start) => normalized(start.clone()),
        None => vec![1.0 / n as f64; n],
    };
    let jump = damping / n as f64;
    let mut residual = f64::INFINITY;
    for iterations in 0..=opts.max_iter {
        let mut y = m.apply(&x);
        if damping > 0.0 {
            y.iter_mut().for_each(|v| *v = (1.0 - damping) * *v + jump);
        }
        residual = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        if residual <= opts.tol {
            return Ok(StationaryDistribution { pi: x, damping, iterations, residual });
        }
        x = normalized(x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect());
    }
    Err(MarkovError::NoConvergence { residual, iterations: opts.max_iter })
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter_mut().for_each(|x| *x /= total);
    }
    v
}

/// Largest `|pi_u P(u -> v) - pi_v P(v -> u)|` over all pairs.
pub fn detailed_balance_gap(m: &TransitionMatrix, pi: &StationaryDistribution) -> f64 {
    let mut worst = 0.0f64;
    for u in 0..m.n() {
        for (v, p) in m.column(u) {
            let gap = (pi.pi[u] * p - pi.pi[v] * m.prob(v, u)).abs();
            worst = worst.max(gap);
        }
    }
    worst
}

/// True iff `pi_u P(u -> v) = pi_v P(v -> u)` within `tol` for every pair.
pub fn is_detailed_balanced(m: &TransitionMatrix, pi: &StationaryDistribution, tol: f64) -> bool {
    detailed_balance_gap(m, pi) <= tol
}

/// Symmetric adjacency `alpha * M Pi` of a detailed-balanced chain.
///
/// The stationary distribution is computed with default options; the
/// detailed-balance check uses tolerance `1e-10`.
pub fn symmetrize_from_markov(m: &TransitionMatrix, alpha: f64) -> Result<LayerGraph, MarkovError> {
    let pi = stationary(m, &StationaryOptions::default())?;
    symmetrize_with(m, &pi, alpha, 1e-10)
}

/// As [`symmetrize_from_markov`] with a known stationary distribution.
pub fn symmetrize_with(
    m: &TransitionMatrix,
    pi: &StationaryDistribution,
    alpha: f64,
    tol: f64,
) -> Result<LayerGraph, MarkovError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(MarkovError::NonPositiveScale { index: 0, value: alpha });
    }
    let imbalance = detailed_balance_gap(m, pi);
    if imbalance > tol {
        return Err(MarkovError::NotDetailedBalanced { imbalance });
    }
    let n = m.n();
    let mut entries = Vec::new();
    for u in 0..n {
        for (v, p) in m.column(u) {
            if u <= v {
                // Average the two flows so the stored matrix is exactly symmetric.
                let w = alpha * 0.5 * (pi.pi[u] * p + pi.pi[v] * m.prob(v, u));
                entries.push((u, v, w));
            }
        }
    }
    Ok(LayerGraph::from_edges(n, false, entries).expect("flows are finite and non-negative"))
}
