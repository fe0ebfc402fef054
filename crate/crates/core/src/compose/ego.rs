//! Composition from fully observed egocentric inter-layer dynamics.
//!
//! Each vertex `u` carries an `l x l` column-stochastic matrix `M_u` whose
//! entry `(j, i)` is the probability that a walker at `u` in layer `i` next
//! acts in layer `j`. The ego block `X_u = M_u Gamma`, with
//! `Gamma_i = d_i / M_u(i, i)`, is the unique slice whose random walk
//! reproduces `M_u` while keeping the intra-layer weight `d_i` of every
//! instance; its off-diagonal entries are the inter-layer edges.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{common_n, layer_degrees, ComposeError, SuperAdjacency};
use crate::graph::LayerGraph;

const STOCHASTIC_TOL: f64 = 1e-12;

/// Egocentric inter-layer transition matrix of one vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct EgoMarkov {
    pub vertex: usize,
    m: DMatrix<f64>,
}

impl EgoMarkov {
    /// `m[(to, from)]` holds `P(from -> to)`; columns must sum to 1.
    pub fn new(vertex: usize, m: DMatrix<f64>) -> Result<Self, ComposeError> {
        if m.nrows() != m.ncols() {
            return Err(ComposeError::DimensionMismatch { what: "ego matrix", expected: m.nrows(), actual: m.ncols() });
        }
        if m.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(ComposeError::OutOfRange { vertex });
        }
        for (column, col) in m.column_iter().enumerate() {
            let sum = col.sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(ComposeError::NotStochastic { vertex, column, sum });
            }
        }
        Ok(Self { vertex, m })
    }

    /// From row-major nested vectors, `rows[to][from]`.
    pub fn from_rows(vertex: usize, rows: &[Vec<f64>]) -> Result<Self, ComposeError> {
        let l = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != l) {
            return Err(ComposeError::DimensionMismatch { what: "ego matrix", expected: l, actual: bad.len() });
        }
        Self::new(vertex, DMatrix::from_fn(l, l, |r, c| rows[r][c]))
    }

    /// A vertex that never switches layers.
    pub fn identity(vertex: usize, l: usize) -> Self {
        Self { vertex, m: DMatrix::identity(l, l) }
    }

    pub fn l(&self) -> usize {
        self.m.nrows()
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.m[(to, from)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// `rows[to][from]`.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

/// The `l x l` vertical slice of one vertex: `x[(to, from)]` is the weight
/// of `(u, from) -> (u, to)`, the diagonal holds intra-layer out-degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct EgoBlock {
    pub vertex: usize,
    pub x: DMatrix<f64>,
}

impl EgoBlock {
    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.x[(to, from)]
    }

    /// `max |x_ij - x_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let l = self.x.nrows();
        let mut worst = 0.0f64;
        for i in 0..l {
            for j in 0..i {
                worst = worst.max((self.x[(i, j)] - self.x[(j, i)]).abs());
            }
        }
        worst
    }

    /// Total out-weight of each instance (column sums).
    pub fn out_weights(&self) -> Vec<f64> {
        self.x.column_iter().map(|c| c.sum()).collect()
    }

    /// Sum of all entries.
    pub fn volume(&self) -> f64 {
        self.x.sum()
    }
}

/// Builds `X_u` from `M_u` and the out-degrees of `u` in the transformed layers.
pub fn ego_block(vertex: usize, ego: &EgoMarkov, degrees: &[f64]) -> Result<EgoBlock, ComposeError> {
    let l = ego.l();
    if degrees.len() != l {
        return Err(ComposeError::DimensionMismatch { what: "degrees", expected: l, actual: degrees.len() });
    }
    for i in 0..l {
        if ego.prob(i, i) == 0.0 {
            return Err(ComposeError::ZeroDiagonal { vertex, layer: i });
        }
    }
    for (i, &d) in degrees.iter().enumerate() {
        let switches = (0..l).any(|j| j != i && (ego.prob(i, j) > 0.0 || ego.prob(j, i) > 0.0));
        if d <= 0.0 && switches {
            return Err(ComposeError::ZeroDegree { vertex, layer: i });
        }
    }
    let x = DMatrix::from_fn(l, l, |to, from| {
        if to == from {
            degrees[from]
        } else {
            ego.prob(from, to) / ego.prob(from, from) * degrees[from]
        }
    });
    Ok(EgoBlock { vertex, x })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EgoOptions {
    /// Largest asymmetry accepted when all layers are undirected.
    pub tol: f64,
    /// Replace an asymmetric undirected block by `(X + X^T) / 2` instead of failing.
    pub force_symmetric: bool,
}

impl Default for EgoOptions {
    fn default() -> Self {
        Self { tol: 1e-10, force_symmetric: false }
    }
}

/// Undirected feasibility diagnosis for a set of ego matrices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    /// `(vertex, max |X_u - X_u^T|)` for every vertex.
    pub asymmetry: Vec<(usize, f64)>,
    pub tol: f64,
    pub feasible: bool,
    /// Reversibility constraints per vertex, `l(l+1)/2 - 1`.
    pub constraints: usize,
    /// Free inter-layer weights of a symmetric slice, `l(l-1)/2`.
    pub unknowns: usize,
}

impl FeasibilityReport {
    pub fn infeasible_vertices(&self) -> Vec<usize> {
        self.asymmetry.iter().filter(|(_, a)| *a > self.tol).map(|(u, _)| *u).collect()
    }

    pub fn worst(&self) -> f64 {
        self.asymmetry.iter().map(|(_, a)| *a).fold(0.0, f64::max)
    }
}

/// Checks whether every ego block is symmetric, i.e. whether an undirected
/// composition can honour all ego matrices exactly.
///
/// `degrees[u][i]` is the out-degree of `u` in layer `i`.
pub fn check_undirected_feasibility(
    egos: &[EgoMarkov],
    degrees: &[Vec<f64>],
    tol: f64,
) -> Result<FeasibilityReport, ComposeError> {
    let l = egos.first().map_or(1, EgoMarkov::l);
    let mut asymmetry = Vec::with_capacity(egos.len());
    for ego in egos {
        let d = degrees.get(ego.vertex).ok_or(ComposeError::DimensionMismatch {
            what: "degree rows",
            expected: ego.vertex + 1,
            actual: degrees.len(),
        })?;
        asymmetry.push((ego.vertex, ego_block(ego.vertex, ego, d)?.asymmetry()));
    }
    let feasible = asymmetry.iter().all(|(_, a)| *a <= tol);
    Ok(FeasibilityReport {
        asymmetry,
        tol,
        feasible,
        constraints: l * (l + 1) / 2 - 1,
        unknowns: l * (l - 1) / 2,
    })
}

/// Super-adjacency whose layers and ego marginals match the inputs.
///
/// When every layer is undirected the ego blocks must be symmetric; an
/// asymmetric block fails with [`ComposeError::AsymmetricEgo`] unless
/// `opts.force_symmetric` is set.
pub fn compose_ego<L: AsRef<LayerGraph>>(
    layers: &[L],
    egos: &[EgoMarkov],
    opts: &EgoOptions,
) -> Result<SuperAdjacency, ComposeError> {
    let n = common_n(layers)?;
    let l = layers.len();
    let ordered = order_egos(egos, n, l)?;
    let degrees = layer_degrees(layers);
    let undirected = layers.iter().all(|g| !g.as_ref().is_directed());

    let mut blocks = Vec::with_capacity(n);
    let mut failures = Vec::new();
    for ego in &ordered {
        match ego_block(ego.vertex, ego, &degrees[ego.vertex]) {
            Ok(block) => blocks.push(block),
            Err(e) => failures.push((ego.vertex, e)),
        }
    }
    if !failures.is_empty() {
        return Err(flatten(failures));
    }

    if undirected {
        let asym: Vec<(usize, f64)> = blocks
            .iter()
            .map(|b| (b.vertex, b.asymmetry()))
            .filter(|(_, a)| *a > opts.tol)
            .collect();
        if !asym.is_empty() {
            if !opts.force_symmetric {
                let worst = asym.iter().map(|(_, a)| *a).fold(0.0, f64::max);
                return Err(ComposeError::AsymmetricEgo { vertices: asym.into_iter().map(|(u, _)| u).collect(), worst });
            }
            log::warn!("symmetrizing {} infeasible ego blocks by averaging", asym.len());
        }
        // Exact symmetry keeps the composed graph undirected.
        for b in &mut blocks {
            let t = b.x.transpose();
            b.x = (&b.x + t) * 0.5;
        }
    }

    let graphs: Vec<LayerGraph> = layers.iter().map(|g| g.as_ref().clone()).collect();
    let mut s = SuperAdjacency::block_diagonal(graphs)?;
    for b in &blocks {
        for from in 0..l {
            for to in 0..l {
                if from != to {
                    s.set_inter(b.vertex, from, to, b.weight(from, to))?;
                }
            }
        }
    }
    Ok(s)
}

pub(super) fn order_egos(egos: &[EgoMarkov], n: usize, l: usize) -> Result<Vec<&EgoMarkov>, ComposeError> {
    let mut slots: Vec<Option<&EgoMarkov>> = vec![None; n];
    for ego in egos {
        if ego.l() != l {
            return Err(ComposeError::DimensionMismatch { what: "ego matrix", expected: l, actual: ego.l() });
        }
        let slot = slots.get_mut(ego.vertex).ok_or(ComposeError::DimensionMismatch {
            what: "ego vertex",
            expected: n,
            actual: ego.vertex,
        })?;
        if slot.replace(ego).is_some() {
            return Err(ComposeError::DuplicateEgo(ego.vertex));
        }
    }
    slots.into_iter().enumerate().map(|(u, s)| s.ok_or(ComposeError::MissingEgo(u))).collect()
}

pub(super) fn flatten(mut failures: Vec<(usize, ComposeError)>) -> ComposeError {
    if failures.len() == 1 {
        failures.pop().map(|(_, e)| e).expect("one failure")
    } else {
        ComposeError::PerVertex(failures)
    }
}
