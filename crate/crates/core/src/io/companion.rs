//! JSON companion files keyed by layer name and vertex label.

use std::collections::BTreeMap;

use super::{IoError, LayeredDataset};
use crate::compose::EgoMarkov;

/// `{"<layer>": {"<label>": value}}`; unlisted layers and vertices get `default`.
/// Returns one vector per layer.
pub fn parse_layer_values(text: &str, ds: &LayeredDataset, default: f64) -> Result<Vec<Vec<f64>>, IoError> {
    let raw: BTreeMap<String, BTreeMap<String, f64>> = serde_json::from_str(text)?;
    let index = ds.label_index();
    let mut values = vec![vec![default; ds.n()]; ds.l()];
    for (layer, entries) in raw {
        let i = ds.layer_id(&layer).ok_or(IoError::UnknownLayerName(layer))?;
        for (label, value) in entries {
            let u = *index.get(label.as_str()).ok_or(IoError::UnknownVertex(label))?;
            values[i][u] = value;
        }
    }
    Ok(values)
}

/// `{"<label>": [[...], ...]}`, each matrix written with columns summing to
/// one (row = destination layer, column = source layer). Unlisted vertices
/// never switch layers.
pub fn parse_egos(text: &str, ds: &LayeredDataset) -> Result<Vec<EgoMarkov>, IoError> {
    let raw: BTreeMap<String, Vec<Vec<f64>>> = serde_json::from_str(text)?;
    let index = ds.label_index();
    let mut egos: Vec<EgoMarkov> = (0..ds.n()).map(|u| EgoMarkov::identity(u, ds.l())).collect();
    for (label, rows) in raw {
        let u = *index.get(label.as_str()).ok_or(IoError::UnknownVertex(label))?;
        egos[u] = EgoMarkov::from_rows(u, &rows)?;
    }
    Ok(egos)
}

/// `{"<label>": [pi_1, ..., pi_l]}`. The key `"*"` sets the distribution of
/// every unlisted vertex that has edges in all layers; other vertices stay
/// uncoupled.
pub fn parse_pis(text: &str, ds: &LayeredDataset) -> Result<Vec<Option<Vec<f64>>>, IoError> {
    let mut raw: BTreeMap<String, Vec<f64>> = serde_json::from_str(text)?;
    let fallback = raw.remove("*");
    let index = ds.label_index();
    let mut pis: Vec<Option<Vec<f64>>> = vec![None; ds.n()];
    if let Some(pi) = fallback {
        let degrees: Vec<Vec<f64>> = ds.layers.iter().map(|g| g.out_degrees()).collect();
        for (u, slot) in pis.iter_mut().enumerate() {
            if degrees.iter().all(|d| d[u] > 0.0) {
                *slot = Some(pi.clone());
            }
        }
    }
    for (label, pi) in raw {
        let u = *index.get(label.as_str()).ok_or(IoError::UnknownVertex(label))?;
        pis[u] = Some(pi);
    }
    Ok(pis)
}

/// An `l x l` JSON array of layer distances.
pub fn parse_distances(text: &str) -> Result<Vec<Vec<f64>>, IoError> {
    Ok(serde_json::from_str(text)?)
}
