//! DIMACS shortest-path `.gr` files split into a local and a highway layer.
//!
//! Arcs are `a <u> <v> <w>` lines; a companion file assigns a road class to
//! every edge as `<u> <v> <class>` lines. Road networks list each street in
//! both directions, so arcs are merged into undirected edges.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_file, IoError, LayeredDataset};
use crate::compose::{CompositionSpec, DistanceCoupling, DistanceKernel};
use crate::graph::LayerGraph;

/// Source of the layer edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoadWeighting {
    /// `highway_weight` / `local_weight` per class.
    #[default]
    Category,
    /// The arc weight of the `.gr` file.
    Arc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CategoryMap {
    pub highway_classes: Vec<String>,
    pub weighting: RoadWeighting,
    pub highway_weight: f64,
    pub local_weight: f64,
    /// Weight of the entrance/exit link at vertices on both layers.
    pub link_weight: f64,
}

impl Default for CategoryMap {
    fn default() -> Self {
        Self {
            highway_classes: vec!["A1".into(), "A2".into(), "A3".into()],
            weighting: RoadWeighting::Category,
            highway_weight: 2.0,
            local_weight: 1.0,
            link_weight: 1.0,
        }
    }
}

/// Layers `local` (0) and `highway` (1) over the largest connected component
/// of the road network. Vertex labels are the DIMACS ids. The attached
/// composition links the two instances of every vertex present on both
/// layers with `link_weight`.
pub fn read_dimacs_gr(gr: impl AsRef<Path>, categories: impl AsRef<Path>, map: &CategoryMap) -> Result<LayeredDataset, IoError> {
    parse_dimacs_gr(&read_file(gr.as_ref())?, &read_file(categories.as_ref())?, map)
}

pub fn parse_dimacs_gr(gr: &str, categories: &str, map: &CategoryMap) -> Result<LayeredDataset, IoError> {
    let classes = parse_categories(categories)?;
    let mut declared: Option<usize> = None;
    let mut edges: [BTreeMap<(usize, usize), f64>; 2] = [BTreeMap::new(), BTreeMap::new()];
    let mut arcs = 0usize;
    for (k, raw) in gr.lines().enumerate() {
        let line = k + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.as_slice() {
            [] | ["c", ..] => {}
            ["p", "sp", n, _m] => {
                declared = Some(n.parse().map_err(|_| IoError::Parse { line, reason: "bad vertex count".into() })?);
            }
            ["a", u, v, w] => {
                let n = declared.ok_or_else(|| IoError::Parse { line, reason: "arc before `p sp` header".into() })?;
                let id = |t: &str| match t.parse::<usize>() {
                    Ok(x) if (1..=n).contains(&x) => Ok(x),
                    _ => Err(IoError::Parse { line, reason: format!("vertex `{t}` outside 1..={n}") }),
                };
                let (a, b) = (id(u)?, id(v)?);
                let arc_weight = super::parse_weight(line, w)?;
                arcs += 1;
                let key = (a.min(b), a.max(b));
                let class = classes
                    .get(&key)
                    .ok_or_else(|| IoError::MissingCategory { u: u.to_string(), v: v.to_string() })?;
                let highway = map.highway_classes.iter().any(|c| c == class);
                let weight = match map.weighting {
                    RoadWeighting::Category if highway => map.highway_weight,
                    RoadWeighting::Category => map.local_weight,
                    RoadWeighting::Arc => arc_weight,
                };
                edges[usize::from(highway)].entry(key).or_insert(weight);
            }
            _ => return Err(IoError::Parse { line, reason: "expected `c`, `p sp n m` or `a u v w`".into() }),
        }
    }
    let n = declared.ok_or_else(|| IoError::Parse { line: 0, reason: "missing `p sp` header".into() })?;
    log::info!("read {arcs} arcs over {n} vertices");

    let full: Vec<LayerGraph> = edges
        .iter()
        .map(|e| LayerGraph::from_edges(n, false, e.iter().map(|(&(u, v), &w)| (u - 1, v - 1, w))))
        .collect::<Result<_, _>>()?;
    // Each edge has one class, so the two layers never share a key.
    let support = edges.iter().flat_map(|e| e.keys()).map(|&(u, v)| (u - 1, v - 1, 1.0));
    let union = LayerGraph::from_edges(n, false, support)?;
    let keep = union.components().into_iter().max_by_key(|c| c.len()).unwrap_or_default();
    if keep.len() < n {
        log::info!("kept the largest component: {} of {n} vertices", keep.len());
    }
    let layers: Vec<LayerGraph> = full.iter().map(|g| g.induced(&keep)).collect();
    let labels = keep.iter().map(|u| (u + 1).to_string()).collect();
    let mut ds = LayeredDataset::new(vec!["local".into(), "highway".into()], labels, layers)?;
    ds.composition = Some(CompositionSpec::Distance(DistanceCoupling {
        kernel: DistanceKernel::Constant,
        ..DistanceCoupling::temporal(2, map.link_weight)
    }));
    Ok(ds)
}

fn parse_categories(text: &str) -> Result<HashMap<(usize, usize), String>, IoError> {
    let mut classes = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            [] | ["c", ..] => {}
            [u, v, class] => {
                let parse = |t: &str| t.parse::<usize>().map_err(|_| IoError::Parse { line, reason: format!("bad vertex `{t}`") });
                let (a, b) = (parse(u)?, parse(v)?);
                if let Some(old) = classes.insert((a.min(b), a.max(b)), class.to_string()) {
                    if old != *class {
                        return Err(IoError::Parse { line, reason: format!("edge ({u}, {v}) is both {old} and {class}") });
                    }
                }
            }
            _ => return Err(IoError::Parse { line, reason: "expected `<u> <v> <class>`".into() }),
        }
    }
    Ok(classes)
}
