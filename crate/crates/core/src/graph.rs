//! Weighted layer graphs and their degree vectors.
//!
//! Adjacency is stored row-compressed: row `u` lists the out-edges of `u`
//! sorted by target, so `a[u][v]` is the affinity of the edge `u -> v`.
//! Read as column-compressed, the same arrays are the transpose, which is
//! why transition matrices built from a graph come out in compressed-column
//! form without any reshuffling.

use std::collections::BTreeMap;

use sprs::CsMat;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge ({u}, {v}) has non-finite weight {weight}")]
    NonFiniteWeight { u: usize, v: usize, weight: f64 },
    #[error("edge ({u}, {v}) has negative weight {weight}")]
    NegativeWeight { u: usize, v: usize, weight: f64 },
    #[error("edge ({u}, {v}) listed more than once")]
    DuplicateEdge { u: usize, v: usize },
    #[error("undirected graph is not symmetric at ({u}, {v})")]
    Asymmetric { u: usize, v: usize },
    #[error("adjacency must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// One layer: a weighted adjacency over `n` vertices.
///
/// Stored weights are strictly positive and finite; a missing entry is a
/// zero. Undirected graphs keep both orientations of every edge, and a
/// self-loop is stored once on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGraph {
    adjacency: CsMat<f64>,
    directed: bool,
}

/// Out- and in-degrees of every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVector {
    pub out_degree: Vec<f64>,
    pub in_degree: Vec<f64>,
}

impl LayerGraph {
    /// Builds a graph from an edge list.
    ///
    /// For undirected graphs each edge `{u, v}` is given once and stored in
    /// both orientations. Zero weights are dropped.
    pub fn from_edges<I>(n: usize, directed: bool, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries = BTreeMap::new();
        for (u, v, w) in edges {
            check_entry(n, u, v, w)?;
            if w == 0.0 {
                continue;
            }
            if entries.insert((u, v), w).is_some() {
                return Err(GraphError::DuplicateEdge { u, v });
            }
            if !directed && u != v && entries.insert((v, u), w).is_some() {
                return Err(GraphError::DuplicateEdge { u, v });
            }
        }
        Ok(Self::from_sorted(n, directed, entries))
    }

    /// Builds a graph from a full set of stored entries `(u, v, a_uv)`.
    ///
    /// Unlike [`LayerGraph::from_edges`], undirected graphs must list both
    /// orientations and are checked for exact symmetry.
    pub fn from_entries<I>(n: usize, directed: bool, entries: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut map = BTreeMap::new();
        for (u, v, w) in entries {
            check_entry(n, u, v, w)?;
            if w == 0.0 {
                continue;
            }
            if map.insert((u, v), w).is_some() {
                return Err(GraphError::DuplicateEdge { u, v });
            }
        }
        if !directed {
            for (&(u, v), &w) in &map {
                if map.get(&(v, u)) != Some(&w) {
                    return Err(GraphError::Asymmetric { u, v });
                }
            }
        }
        Ok(Self::from_sorted(n, directed, map))
    }

    /// Wraps a row-compressed adjacency matrix.
    pub fn from_csr(adjacency: CsMat<f64>, directed: bool) -> Result<Self, GraphError> {
        let (rows, cols) = adjacency.shape();
        if rows != cols {
            return Err(GraphError::NotSquare { rows, cols });
        }
        let adjacency = if adjacency.is_csr() { adjacency } else { adjacency.to_csr() };
        Self::from_entries(rows, directed, csr_entries(&adjacency))
    }

    /// Graph with no edges.
    pub fn empty(n: usize, directed: bool) -> Self {
        Self::from_sorted(n, directed, BTreeMap::new())
    }

    pub(crate) fn from_sorted(
        n: usize,
        directed: bool,
        entries: BTreeMap<(usize, usize), f64>,
    ) -> Self {
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::with_capacity(entries.len());
        let mut data = Vec::with_capacity(entries.len());
        for (&(u, v), &w) in &entries {
            indptr[u + 1] += 1;
            indices.push(v);
            data.push(w);
        }
        for u in 0..n {
            indptr[u + 1] += indptr[u];
        }
        let adjacency = CsMat::new((n, n), indptr, indices, data);
        Self { adjacency, directed }
    }

    pub fn n(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of stored entries (both orientations for undirected edges).
    pub fn nnz(&self) -> usize {
        self.adjacency.nnz()
    }

    /// The row-compressed adjacency.
    pub fn adjacency(&self) -> &CsMat<f64> {
        &self.adjacency
    }

    /// Affinity `a_uv`, zero when the edge is absent.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adjacency.get(u, v).copied().unwrap_or(0.0)
    }

    /// Out-edges of `u` as `(v, a_uv)`, sorted by `v`.
    pub fn out_edges(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.adjacency.indptr().outer_inds_sz(u);
        let idx = &self.adjacency.indices()[range.clone()];
        let val = &self.adjacency.data()[range];
        idx.iter().copied().zip(val.iter().copied())
    }

    /// Every stored entry `(u, v, a_uv)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        csr_entries(&self.adjacency)
    }

    /// Each undirected edge once (`u <= v`); for directed graphs, every entry.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let directed = self.directed;
        self.entries().filter(move |&(u, v, _)| directed || u <= v)
    }

    pub fn out_degree(&self, u: usize) -> f64 {
        self.out_edges(u).map(|(_, w)| w).sum()
    }

    pub fn out_degrees(&self) -> Vec<f64> {
        (0..self.n()).map(|u| self.out_degree(u)).collect()
    }

    pub fn in_degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.n()];
        for (_, v, w) in self.entries() {
            deg[v] += w;
        }
        deg
    }

    pub fn degrees(&self) -> DegreeVector {
        DegreeVector { out_degree: self.out_degrees(), in_degree: self.in_degrees() }
    }

    /// Sum of all stored weights.
    pub fn volume(&self) -> f64 {
        self.adjacency.data().iter().sum()
    }

    /// Same edges with every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut adjacency = self.adjacency.clone();
        adjacency.data_mut().iter_mut().for_each(|w| *w *= factor);
        Self { adjacency, directed: self.directed }
    }

    /// `(A + A^T) / 2` as an undirected graph. Undirected input is returned as is.
    pub fn symmetrized(&self) -> Self {
        if !self.directed {
            return self.clone();
        }
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in self.entries() {
            *map.entry((u, v)).or_insert(0.0) += 0.5 * w;
            *map.entry((v, u)).or_insert(0.0) += 0.5 * w;
        }
        Self::from_sorted(self.n(), false, map)
    }

    /// True when `a_uv == a_vu` for every pair.
    pub fn is_symmetric(&self) -> bool {
        self.entries().all(|(u, v, w)| self.weight(v, u) == w)
    }

    /// Connected components of the underlying undirected support, each
    /// sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut neighbours = vec![Vec::new(); n];
        for (u, v, _) in self.entries() {
            if u != v {
                neighbours[u].push(v);
                neighbours[v].push(u);
            }
        }
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &v in &neighbours[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    /// Subgraph on `keep` (sorted vertex ids), relabelled `0..keep.len()`.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let mut new_id = vec![usize::MAX; self.n()];
        for (i, &u) in keep.iter().enumerate() {
            new_id[u] = i;
        }
        let map = self
            .entries()
            .filter(|&(u, v, _)| new_id[u] != usize::MAX && new_id[v] != usize::MAX)
            .map(|(u, v, w)| ((new_id[u], new_id[v]), w))
            .collect();
        Self::from_sorted(keep.len(), self.directed, map)
    }
}

impl AsRef<LayerGraph> for LayerGraph {
    fn as_ref(&self) -> &LayerGraph {
        self
    }
}

fn check_entry(n: usize, u: usize, v: usize, w: f64) -> Result<(), GraphError> {
    for vertex in [u, v] {
        if vertex >= n {
            return Err(GraphError::VertexOutOfRange { vertex, n });
        }
    }
    if !w.is_finite() {
        return Err(GraphError::NonFiniteWeight { u, v, weight: w });
    }
    if w < 0.0 {
        return Err(GraphError::NegativeWeight { u, v, weight: w });
    }
    Ok(())
}

pub(crate) fn csr_entries(m: &CsMat<f64>) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
    m.outer_iterator()
        .enumerate()
        .flat_map(|(u, row)| row.iter().map(move |(v, &w)| (u, v, w)).collect::<Vec<_>>())
}
