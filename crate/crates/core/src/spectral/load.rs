use serde::Serialize;

use super::SpectralError;
use crate::compose::SuperAdjacency;

/// Share of total degree mass held by each layer's instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerLoad {
    pub fractions: Vec<f64>,
}

/// `load_i = sum_u outdeg(u, i) / total`, inter-layer weights counted at
/// the instance they leave.
pub fn layer_load(s: &SuperAdjacency) -> Result<LayerLoad, SpectralError> {
    let mass: Vec<f64> = (0..s.l()).map(|i| (0..s.n()).map(|u| s.instance_out_degree(u, i)).sum()).collect();
    let total: f64 = mass.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(SpectralError::EmptyGraph);
    }
    Ok(LayerLoad { fractions: mass.iter().map(|m| m / total).collect() })
}

/// Factor for layer `layer`'s intra-layer weights at which its load equals
/// `target`, found by bisection on the (increasing) load curve.
///
/// Stops once the bracket is narrower than `tol` relative to its upper end.
pub fn scale_for_layer_load(s: &SuperAdjacency, layer: usize, target: f64, tol: f64) -> Result<f64, SpectralError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(SpectralError::InvalidTarget(target));
    }
    if s.layer(layer).volume() <= 0.0 {
        return Err(SpectralError::EmptyLayer { layer });
    }
    let load_at = |f: f64| layer_load(&s.with_layer_scaled(layer, f)).map(|l| l.fractions[layer]);
    let (mut lo, mut hi) = (1.0, 1.0);
    while load_at(hi)? < target {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(SpectralError::Unreachable { layer, target });
        }
    }
    while load_at(lo)? > target {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return Err(SpectralError::Unreachable { layer, target });
        }
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if load_at(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
