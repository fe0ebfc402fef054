//! Line-oriented layered edge list.
//!
//! ```text
//! # comment
//! layer phone undirected
//! layer email directed
//! vertex alice
//! edge phone alice bob 2.5
//! ```
//!
//! Vertices get ids in order of first appearance (`vertex` lines or edge
//! endpoints) and are shared by all layers. Undirected edges are listed once.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use super::{parse_weight, read_file, IoError};
use crate::compose::{compose, ComposeError, CompositionSpec, SuperAdjacency};
use crate::graph::LayerGraph;
use crate::transform::{transform_layer, DynamicsParams, TransformError};

/// Named layers over a shared vertex label space.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredDataset {
    pub layer_names: Vec<String>,
    pub labels: Vec<String>,
    pub layers: Vec<LayerGraph>,
    /// Per-layer dynamics; `None` means identity.
    pub params: Vec<Option<DynamicsParams>>,
    pub composition: Option<CompositionSpec>,
}

impl LayeredDataset {
    pub fn new(layer_names: Vec<String>, labels: Vec<String>, layers: Vec<LayerGraph>) -> Result<Self, IoError> {
        if layer_names.len() != layers.len() {
            return Err(ComposeError::DimensionMismatch { what: "layer names", expected: layers.len(), actual: layer_names.len() }.into());
        }
        if let Some(g) = layers.iter().find(|g| g.n() != labels.len()) {
            return Err(ComposeError::DimensionMismatch { what: "layer size", expected: labels.len(), actual: g.n() }.into());
        }
        for (i, name) in layer_names.iter().enumerate() {
            if layer_names[..i].contains(name) {
                return Err(IoError::DuplicateLayer { line: 0, name: name.clone() });
            }
        }
        let params = vec![None; layers.len()];
        Ok(Self { layer_names, labels, layers, params, composition: None })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn l(&self) -> usize {
        self.layers.len()
    }

    pub fn vertex_id(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn layer_id(&self, name: &str) -> Option<usize> {
        self.layer_names.iter().position(|l| l == name)
    }

    /// Label to id map.
    pub fn label_index(&self) -> HashMap<&str, usize> {
        self.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
    }

    /// Interaction matrices of every layer under its dynamics.
    pub fn transformed(&self) -> Result<Vec<LayerGraph>, TransformError> {
        self.layers
            .iter()
            .zip(&self.params)
            .map(|(g, p)| match p {
                Some(p) => transform_layer(g, p).map(|w| w.graph),
                None => Ok(g.clone()),
            })
            .collect()
    }

    /// Composes the stored layers, multiplex when no spec is attached.
    pub fn compose(&self) -> Result<SuperAdjacency, ComposeError> {
        compose(&self.layers, self.composition.as_ref().unwrap_or(&CompositionSpec::Multiplex))
    }
}

pub fn read_layers(path: impl AsRef<Path>) -> Result<LayeredDataset, IoError> {
    parse_layers(&read_file(path.as_ref())?)
}

pub fn parse_layers(text: &str) -> Result<LayeredDataset, IoError> {
    let mut names: Vec<(String, bool)> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<BTreeMap<(usize, usize), f64>> = Vec::new();

    let mut intern = |label: &str, labels: &mut Vec<String>| -> usize {
        *ids.entry(label.to_string()).or_insert_with(|| {
            labels.push(label.to_string());
            labels.len() - 1
        })
    };

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            ["layer", name, kind] => {
                let directed = match *kind {
                    "directed" => true,
                    "undirected" => false,
                    other => return Err(IoError::Parse { line, reason: format!("expected directed|undirected, got `{other}`") }),
                };
                if names.iter().any(|(n, _)| n == name) {
                    return Err(IoError::DuplicateLayer { line, name: name.to_string() });
                }
                names.push((name.to_string(), directed));
                edges.push(BTreeMap::new());
            }
            ["vertex", label] => {
                intern(label, &mut labels);
            }
            ["edge", layer, u, v, w] => {
                let i = names
                    .iter()
                    .position(|(n, _)| n == layer)
                    .ok_or_else(|| IoError::UnknownLayer { line, name: layer.to_string() })?;
                let w = parse_weight(line, w)?;
                let (a, b) = (intern(u, &mut labels), intern(v, &mut labels));
                let key = if names[i].1 { (a, b) } else { (a.min(b), a.max(b)) };
                if edges[i].insert(key, w).is_some() {
                    return Err(IoError::DuplicateEdge { line, layer: layer.to_string(), u: u.to_string(), v: v.to_string() });
                }
            }
            [keyword, ..] => {
                return Err(IoError::Parse { line, reason: format!("malformed `{keyword}` line") });
            }
        }
    }

    let n = labels.len();
    let layers = names
        .iter()
        .zip(edges)
        .map(|((_, directed), e)| LayerGraph::from_edges(n, *directed, e.into_iter().map(|((u, v), w)| (u, v, w))))
        .collect::<Result<Vec<_>, _>>()?;
    LayeredDataset::new(names.into_iter().map(|(n, _)| n).collect(), labels, layers)
}

/// Text that [`parse_layers`] reads back to an equal dataset.
pub fn write_layers(ds: &LayeredDataset) -> String {
    let mut out = String::new();
    for (name, g) in ds.layer_names.iter().zip(&ds.layers) {
        let kind = if g.is_directed() { "directed" } else { "undirected" };
        writeln!(out, "layer {name} {kind}").unwrap();
    }
    for label in &ds.labels {
        writeln!(out, "vertex {label}").unwrap();
    }
    for (name, g) in ds.layer_names.iter().zip(&ds.layers) {
        for (u, v, w) in g.edges() {
            writeln!(out, "edge {name} {} {} {w}", ds.labels[u], ds.labels[v]).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let ds = parse_layers("layer a undirected\n# one edge\nedge a x y 1.5\n").unwrap();
        assert_eq!((ds.n(), ds.l()), (2, 1));
        assert_eq!(ds.layers[0].weight(1, 0), 1.5);
        assert_eq!(ds.labels, ["x", "y"]);
    }

    #[test]
    fn unknown_and_duplicate() {
        assert!(matches!(parse_layers("layer a directed\nedge b x y 1\n"), Err(IoError::UnknownLayer { line: 2, .. })));
        assert!(matches!(
            parse_layers("layer a undirected\nedge a x y 1\nedge a y x 2\n"),
            Err(IoError::DuplicateEdge { line: 3, .. })
        ));
        assert!(parse_layers("layer a directed\nedge a x y 1\nedge a y x 2\n").is_ok());
        assert!(matches!(parse_layers("layer a directed\nlayer a undirected\n"), Err(IoError::DuplicateLayer { line: 2, .. })));
        assert!(matches!(parse_layers("layer a sideways\n"), Err(IoError::Parse { line: 1, .. })));
        assert!(matches!(parse_layers("layer a directed\nedge a x y -1\n"), Err(IoError::Parse { line: 2, .. })));
        assert!(matches!(parse_layers("edge a x\n"), Err(IoError::Parse { line: 1, .. })));
    }

    #[test]
    fn round_trip() {
        let text = "layer p undirected\nlayer e directed\nvertex lonely\nedge p a b 0.1\nedge p b b 3\nedge e b a 0.30000000000000004\n";
        let ds = parse_layers(text).unwrap();
        let back = parse_layers(&write_layers(&ds)).unwrap();
        assert_eq!(back, ds);
        assert_eq!(ds.vertex_id("lonely"), Some(0));
    }
}
