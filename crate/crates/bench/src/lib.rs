//! Synthetic inputs for benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use multinet::compose::EgoMarkov;
use multinet::LayerGraph;

/// `l` undirected layers over `n` vertices with two planted communities.
/// A ring keeps every vertex present in every layer.
pub fn planted_layers(n: usize, l: usize, p_in: f64, p_out: f64, seed: u64) -> Vec<LayerGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..l)
        .map(|_| {
            let mut edges: Vec<(usize, usize, f64)> = (0..n).map(|u| (u.min((u + 1) % n), u.max((u + 1) % n), 1.0)).collect();
            for u in 0..n {
                for v in u + 2..n {
                    let p = if (u < n / 2) == (v < n / 2) { p_in } else { p_out };
                    if rng.random_bool(p) && !(u == 0 && v == n - 1) {
                        edges.push((u, v, rng.random_range(0.5..2.0)));
                    }
                }
            }
            LayerGraph::from_edges(n, false, edges).expect("generated edges are valid")
        })
        .collect()
}

/// Symmetric-slice egos, so composition over undirected layers is feasible.
pub fn feasible_egos(layers: &[LayerGraph], seed: u64) -> Vec<EgoMarkov> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, l) = (layers[0].n(), layers.len());
    (0..n)
        .map(|u| {
            let mut x = nalgebra::DMatrix::zeros(l, l);
            for i in 0..l {
                x[(i, i)] = layers[i].out_degree(u);
                for j in 0..i {
                    let w = rng.random_range(0.1..2.0);
                    x[(i, j)] = w;
                    x[(j, i)] = w;
                }
            }
            for mut col in x.column_iter_mut() {
                let s = col.sum();
                col /= s;
            }
            EgoMarkov::new(u, x).expect("columns are stochastic")
        })
        .collect()
}
