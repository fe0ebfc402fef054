//! Composition from per-vertex layer distributions.
//!
//! For an undirected slice the walk is detailed-balanced and its stationary
//! distribution is proportional to the instance out-weights (row sums of
//! `X_u`). Given `pi_u` and the diagonal `d`, every feasible slice has row
//! sums `s * pi_u` for some volume `s`; the inter-layer weights must then
//! realize residual row sums `r_i = s * pi_i - d_i` symmetrically.
//!
//! Two layers leave no freedom and have a closed form. Three or more take
//! the smallest feasible `s` (the minimum-volume slice) and spread the
//! residuals by symmetric proportional fitting.

use nalgebra::DMatrix;

use super::ego::{flatten, EgoBlock};
use super::{common_n, layer_degrees, ComposeError, SuperAdjacency};
use crate::graph::LayerGraph;

const DISTRIBUTION_TOL: f64 = 1e-9;
const FIT_TOL: f64 = 1e-10;
const FIT_SCALING_ITER: usize = 50;
const FIT_MAX_ITER: usize = 200;
const FIT_POLISH_STEPS: usize = 3;

/// Inter-layer weight of a two-layer slice with stationary `(pi1, 1 - pi1)`
/// and intra-layer degrees `(d1, d2)`.
pub fn two_layer_coupling(vertex: usize, pi1: f64, d1: f64, d2: f64) -> Result<f64, ComposeError> {
    if !(pi1 > 0.0 && pi1 < 1.0) {
        return Err(ComposeError::InvalidDistribution { vertex });
    }
    let total = d1 + d2;
    let numerator = pi1 * total - d1;
    let denominator = 1.0 - 2.0 * pi1;
    let endpoint = if total > 0.0 { d1 / total } else { 0.5 };
    let interval = Some((endpoint.min(0.5), endpoint.max(0.5)));
    if denominator == 0.0 {
        return if d1 == d2 {
            Err(ComposeError::Underdetermined { vertex })
        } else {
            Err(ComposeError::Degenerate { vertex })
        };
    }
    if numerator.abs() <= f64::EPSILON * total.max(1.0) {
        return Ok(0.0);
    }
    if numerator.signum() != denominator.signum() {
        return Err(ComposeError::Infeasible {
            vertex,
            reason: format!("pi1 = {pi1} must lie between 0.5 and d1/(d1+d2) = {endpoint}"),
            interval,
        });
    }
    Ok(numerator / denominator)
}

/// Range `[s_min, s_max]` of slice volumes for which the residual row sums
/// are non-negative and realizable by a symmetric zero-diagonal matrix.
pub fn stationary_scale_range(vertex: usize, pi: &[f64], degrees: &[f64]) -> Result<(f64, f64), ComposeError> {
    check_distribution(vertex, pi, degrees)?;
    let total: f64 = degrees.iter().sum();
    let mut lo = pi.iter().zip(degrees).map(|(p, d)| d / p).fold(0.0, f64::max);
    let mut hi = f64::INFINITY;
    // 2 r_i <= sum_j r_j  <=>  s (2 pi_i - 1) <= 2 d_i - total
    for (&p, &d) in pi.iter().zip(degrees) {
        let slope = 2.0 * p - 1.0;
        let bound = 2.0 * d - total;
        if slope < 0.0 {
            lo = lo.max(bound / slope);
        } else if slope > 0.0 {
            hi = hi.min(bound / slope);
        } else if bound < 0.0 {
            return Err(ComposeError::Infeasible { vertex, reason: "a layer holding half the mass needs more than half the degree".into(), interval: None });
        }
    }
    if lo > hi * (1.0 + 1e-12) {
        return Err(ComposeError::Infeasible {
            vertex,
            reason: format!("no volume satisfies the row-sum bounds (need {lo} <= s <= {hi})"),
            interval: None,
        });
    }
    Ok((lo, hi.max(lo)))
}

/// Ego block with diagonal `degrees` whose walk has stationary `pi`.
///
/// Two layers use the closed form; more layers use the minimum-volume slice.
pub fn ego_block_from_stationary(vertex: usize, pi: &[f64], degrees: &[f64]) -> Result<EgoBlock, ComposeError> {
    check_distribution(vertex, pi, degrees)?;
    match pi.len() {
        1 => Ok(EgoBlock { vertex, x: DMatrix::from_element(1, 1, degrees[0]) }),
        2 => {
            let x = two_layer_coupling(vertex, pi[0], degrees[0], degrees[1])?;
            Ok(EgoBlock { vertex, x: DMatrix::from_row_slice(2, 2, &[degrees[0], x, x, degrees[1]]) })
        }
        _ => {
            let (s_min, _) = stationary_scale_range(vertex, pi, degrees)?;
            ego_block_at_scale(vertex, pi, degrees, s_min)
        }
    }
}

/// Slice with row sums `scale * pi` (three or more layers).
pub fn ego_block_at_scale(vertex: usize, pi: &[f64], degrees: &[f64], scale: f64) -> Result<EgoBlock, ComposeError> {
    check_distribution(vertex, pi, degrees)?;
    let residual: Vec<f64> = pi
        .iter()
        .zip(degrees)
        .map(|(p, d)| {
            let r = scale * p - d;
            if r.abs() <= 1e-12 * scale { 0.0 } else { r }
        })
        .collect();
    if residual.iter().any(|&r| r < 0.0) {
        return Err(ComposeError::Infeasible { vertex, reason: format!("volume {scale} is below d_i / pi_i"), interval: None });
    }
    let off = realize_symmetric(vertex, &residual)?;
    let l = pi.len();
    let x = DMatrix::from_fn(l, l, |i, j| if i == j { degrees[i] } else { off[(i, j)] });
    Ok(EgoBlock { vertex, x })
}

/// Symmetric non-negative zero-diagonal matrix with row sums `r`.
fn realize_symmetric(vertex: usize, r: &[f64]) -> Result<DMatrix<f64>, ComposeError> {
    let l = r.len();
    let mut y = DMatrix::zeros(l, l);
    let total: f64 = r.iter().sum();
    if total == 0.0 {
        return Ok(y);
    }
    let (big, &r_max) = r.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
    if 2.0 * r_max > total * (1.0 + 1e-12) {
        return Err(ComposeError::Infeasible { vertex, reason: "one residual exceeds the others combined".into(), interval: None });
    }
    if 2.0 * r_max >= total * (1.0 - 1e-12) {
        // On the boundary the only realization is a star around the largest residual.
        for j in (0..l).filter(|&j| j != big) {
            y[(big, j)] = r[j];
            y[(j, big)] = r[j];
        }
        return Ok(y);
    }

    // y_ij = g_i g_j on the support of positive residuals, scaled so that
    // g_i * sum_{j != i} g_j = r_i. Geometric-mean scaling gets close; Newton
    // steps in log space finish near the boundary, where scaling stalls.
    let support: Vec<usize> = (0..l).filter(|&i| r[i] > 0.0).collect();
    let rs: Vec<f64> = support.iter().map(|&i| r[i]).collect();
    let mut g: Vec<f64> = rs.iter().map(|&ri| ri / total.sqrt()).collect();
    let residual = |g: &[f64]| {
        let sum: f64 = g.iter().sum();
        g.iter().zip(&rs).map(|(&gi, &ri)| gi * (sum - gi) - ri).collect::<Vec<f64>>()
    };
    let norm = |f: &[f64]| f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for _ in 0..FIT_SCALING_ITER {
        let sum: f64 = g.iter().sum();
        g = g.iter().zip(&rs).map(|(&gi, &ri)| (gi * ri / (sum - gi)).sqrt()).collect();
    }
    let (mut converged, mut polish) = (false, 0);
    'fit: for _ in 0..FIT_MAX_ITER {
        let f = residual(&g);
        let err = norm(&f);
        // Once within tolerance, a few more steps cost little and sharpen the volume.
        if err <= FIT_TOL * total {
            converged = true;
            polish += 1;
            if polish > FIT_POLISH_STEPS || err <= 4.0 * f64::EPSILON * total {
                break;
            }
        }
        let k = g.len();
        let sum: f64 = g.iter().sum();
        let jac = DMatrix::from_fn(k, k, |i, j| if i == j { g[i] * (sum - g[i]) } else { g[i] * g[j] });
        let Some(step) = jac.lu().solve(&nalgebra::DVector::from_column_slice(&f)) else { break };
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = g.iter().zip(step.iter()).map(|(&gi, &d)| gi * (-t * d).exp()).collect();
            if norm(&residual(&trial)) < err {
                g = trial;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                if converged {
                    break 'fit;
                }
                return Err(ComposeError::NoConvergence { vertex });
            }
        }
    }
    if !converged {
        return Err(ComposeError::NoConvergence { vertex });
    }
    let mut full = vec![0.0; l];
    for (&i, &gi) in support.iter().zip(&g) {
        full[i] = gi;
    }
    let g = full;
    for &i in &support {
        for &j in &support {
            if i != j {
                y[(i, j)] = g[i] * g[j];
            }
        }
    }
    Ok(y)
}

fn check_distribution(vertex: usize, pi: &[f64], degrees: &[f64]) -> Result<(), ComposeError> {
    if pi.len() != degrees.len() {
        return Err(ComposeError::DimensionMismatch { what: "layer distribution", expected: degrees.len(), actual: pi.len() });
    }
    let sum: f64 = pi.iter().sum();
    if pi.iter().any(|&p| !(p.is_finite() && p > 0.0)) || (sum - 1.0).abs() > DISTRIBUTION_TOL {
        return Err(ComposeError::InvalidDistribution { vertex });
    }
    if degrees.iter().any(|&d| !(d.is_finite() && d >= 0.0)) {
        return Err(ComposeError::DimensionMismatch { what: "non-negative degrees", expected: degrees.len(), actual: 0 });
    }
    Ok(())
}

/// Super-adjacency whose vertical slices have the requested stationary
/// distributions. Vertices mapped to `None` get no inter-layer edges.
pub fn compose_stationary<L: AsRef<LayerGraph>>(
    layers: &[L],
    pis: &[Option<Vec<f64>>],
) -> Result<SuperAdjacency, ComposeError> {
    let n = common_n(layers)?;
    let l = layers.len();
    if let Some(i) = layers.iter().position(|g| g.as_ref().is_directed()) {
        return Err(ComposeError::DirectedLayer(i));
    }
    if pis.len() != n {
        return Err(ComposeError::DimensionMismatch { what: "layer distributions", expected: n, actual: pis.len() });
    }
    let degrees = layer_degrees(layers);
    let mut s = SuperAdjacency::block_diagonal(layers.iter().map(|g| g.as_ref().clone()).collect())?;
    let mut failures = Vec::new();
    for (u, pi) in pis.iter().enumerate() {
        let Some(pi) = pi else { continue };
        match ego_block_from_stationary(u, pi, &degrees[u]) {
            Ok(block) => {
                for i in 0..l {
                    for j in (0..l).filter(|&j| j != i) {
                        s.set_inter(u, i, j, block.weight(i, j))?;
                    }
                }
            }
            Err(e) => failures.push((u, e)),
        }
    }
    if !failures.is_empty() {
        return Err(flatten(failures));
    }
    Ok(s)
}
