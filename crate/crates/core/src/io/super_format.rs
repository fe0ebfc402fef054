//! Serialized super-adjacency: Matrix Market coordinates or JSON blocks.
//!
//! Weights are written in Rust's shortest round-trip form, so reading a
//! file back reproduces every weight bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{read_file, IoError};
use crate::compose::SuperAdjacency;
use crate::graph::LayerGraph;

const MM_BANNER: &str = "%%MatrixMarket matrix coordinate real general";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SuperFormat {
    #[default]
    MatrixMarket,
    Json,
}

impl FromStr for SuperFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mm" | "mtx" | "matrix-market" => Ok(Self::MatrixMarket),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format `{other}` (expected mm or json)")),
        }
    }
}

/// A super-adjacency with the names of its vertices and layers.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSuper {
    pub super_adj: SuperAdjacency,
    pub labels: Vec<String>,
    pub layer_names: Vec<String>,
}

impl LabeledSuper {
    /// Default names `0..n` and `0..l`.
    pub fn unlabeled(super_adj: SuperAdjacency) -> Self {
        let labels = (0..super_adj.n()).map(|u| u.to_string()).collect();
        let layer_names = (0..super_adj.l()).map(|i| i.to_string()).collect();
        Self { super_adj, labels, layer_names }
    }

    /// `label@layer` of a flat index.
    pub fn instance_name(&self, flat: usize) -> String {
        let (u, i) = self.super_adj.instance(flat);
        format!("{}@{}", self.labels[u], self.layer_names[i])
    }
}

pub fn write_super(s: &LabeledSuper, format: SuperFormat) -> String {
    match format {
        SuperFormat::MatrixMarket => write_mm(s),
        SuperFormat::Json => serde_json::to_string_pretty(&SuperJson::from(s)).expect("plain data"),
    }
}

/// Reads either format, told apart by the first non-blank character.
pub fn parse_super(text: &str) -> Result<LabeledSuper, IoError> {
    if text.trim_start().starts_with('{') {
        let raw: SuperJson = serde_json::from_str(text)?;
        raw.into_super()
    } else {
        parse_mm(text)
    }
}

pub fn read_super(path: impl AsRef<Path>) -> Result<LabeledSuper, IoError> {
    parse_super(&read_file(path.as_ref())?)
}

fn write_mm(s: &LabeledSuper) -> String {
    let sa = &s.super_adj;
    let flat = sa.to_graph();
    let directed: Vec<&str> = sa.layers().iter().map(|g| if g.is_directed() { "1" } else { "0" }).collect();
    let mut out = String::new();
    writeln!(out, "{MM_BANNER}").unwrap();
    writeln!(out, "% multinet super-adjacency").unwrap();
    writeln!(out, "% n {} l {}", sa.n(), sa.l()).unwrap();
    writeln!(out, "% index flat = layer * n + vertex, 1-based").unwrap();
    writeln!(out, "% directed {}", directed.join(" ")).unwrap();
    writeln!(out, "% layers {}", s.layer_names.join(" ")).unwrap();
    writeln!(out, "% labels {}", s.labels.join(" ")).unwrap();
    writeln!(out, "{} {} {}", flat.n(), flat.n(), flat.nnz()).unwrap();
    for (a, b, w) in flat.entries() {
        writeln!(out, "{} {} {w}", a + 1, b + 1).unwrap();
    }
    out
}

fn parse_mm(text: &str) -> Result<LabeledSuper, IoError> {
    let bad = |line: usize, reason: &str| IoError::Parse { line, reason: reason.to_string() };
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    match lines.next() {
        Some((_, banner)) if banner.eq_ignore_ascii_case(MM_BANNER) => {}
        _ => return Err(bad(1, "missing Matrix Market coordinate banner")),
    }
    let (mut n, mut l) = (None, None);
    let (mut directed, mut layer_names, mut labels) = (None, None, None);
    let mut size = None;
    for (line, content) in lines.by_ref() {
        if content.is_empty() {
            continue;
        }
        if let Some(comment) = content.strip_prefix('%') {
            let tokens: Vec<&str> = comment.split_whitespace().collect();
            match tokens.as_slice() {
                ["n", a, "l", b] => {
                    n = Some(a.parse::<usize>().map_err(|_| bad(line, "bad n"))?);
                    l = Some(b.parse::<usize>().map_err(|_| bad(line, "bad l"))?);
                }
                ["directed", flags @ ..] => {
                    directed = Some(
                        flags
                            .iter()
                            .map(|f| match *f {
                                "0" => Ok(false),
                                "1" => Ok(true),
                                _ => Err(bad(line, "directed flags must be 0 or 1")),
                            })
                            .collect::<Result<Vec<_>, _>>()?,
                    );
                }
                ["layers", names @ ..] => layer_names = Some(names.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
                ["labels", names @ ..] => labels = Some(names.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
                _ => {}
            }
            continue;
        }
        let dims: Vec<usize> = content
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| bad(line, "bad size line"))?;
        if dims.len() != 3 || dims[0] != dims[1] {
            return Err(bad(line, "size line must be `N N nnz`"));
        }
        size = Some((line, dims[0], dims[2]));
        break;
    }
    let (size_line, total, nnz) = size.ok_or_else(|| bad(0, "missing size line"))?;
    let n = n.ok_or_else(|| bad(size_line, "header lacks `% n <n> l <l>`"))?;
    let l = l.expect("set with n");
    if n * l != total {
        return Err(bad(size_line, "matrix size differs from n * l"));
    }
    let directed = directed.unwrap_or_else(|| vec![true; l]);
    if directed.len() != l {
        return Err(bad(size_line, "need one directed flag per layer"));
    }

    let mut entries = BTreeMap::new();
    for (line, content) in lines {
        if content.is_empty() || content.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let [a, b, w] = tokens.as_slice() else {
            return Err(bad(line, "expected `i j weight`"));
        };
        let index = |t: &str| match t.parse::<usize>() {
            Ok(k) if (1..=total).contains(&k) => Ok(k - 1),
            _ => Err(bad(line, "index out of range")),
        };
        let key = (index(a)?, index(b)?);
        if entries.insert(key, super::parse_weight(line, w)?).is_some() {
            return Err(bad(line, "repeated entry"));
        }
    }
    if entries.len() != nnz {
        return Err(bad(size_line, &format!("declared {nnz} entries, found {}", entries.len())));
    }
    let flat = LayerGraph::from_entries(total, true, entries.into_iter().map(|((a, b), w)| (a, b, w)))?;
    let super_adj = SuperAdjacency::from_graph(&flat, n, &directed)?;
    let mut out = LabeledSuper::unlabeled(super_adj);
    if let Some(labels) = labels.filter(|v| v.len() == n) {
        out.labels = labels;
    }
    if let Some(names) = layer_names.filter(|v| v.len() == l) {
        out.layer_names = names;
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct SuperJson {
    n: usize,
    l: usize,
    labels: Vec<String>,
    layer_names: Vec<String>,
    layers: Vec<JsonLayer>,
    /// Non-empty off-diagonal blocks.
    inter: Vec<JsonInter>,
}

#[derive(Serialize, Deserialize)]
struct JsonLayer {
    directed: bool,
    /// Every stored `(u, v, w)`, both orientations for undirected layers.
    entries: Vec<(usize, usize, f64)>,
}

#[derive(Serialize, Deserialize)]
struct JsonInter {
    from: usize,
    to: usize,
    /// `(vertex, weight)` pairs with non-zero weight.
    weights: Vec<(usize, f64)>,
}

impl From<&LabeledSuper> for SuperJson {
    fn from(s: &LabeledSuper) -> Self {
        let sa = &s.super_adj;
        let layers = sa
            .layers()
            .iter()
            .map(|g| JsonLayer { directed: g.is_directed(), entries: g.entries().collect() })
            .collect();
        let mut inter = Vec::new();
        for from in 0..sa.l() {
            for to in (0..sa.l()).filter(|&to| to != from) {
                let weights: Vec<(usize, f64)> =
                    sa.inter_block(from, to).iter().copied().enumerate().filter(|&(_, w)| w != 0.0).collect();
                if !weights.is_empty() {
                    inter.push(JsonInter { from, to, weights });
                }
            }
        }
        Self { n: sa.n(), l: sa.l(), labels: s.labels.clone(), layer_names: s.layer_names.clone(), layers, inter }
    }
}

impl SuperJson {
    fn into_super(self) -> Result<LabeledSuper, IoError> {
        let bad = |reason: String| IoError::Parse { line: 0, reason };
        if self.layers.len() != self.l || self.labels.len() != self.n || self.layer_names.len() != self.l {
            return Err(bad("layer, label or name count differs from the header".into()));
        }
        let layers = self
            .layers
            .into_iter()
            .map(|layer| LayerGraph::from_entries(self.n, layer.directed, layer.entries))
            .collect::<Result<Vec<_>, _>>()?;
        let mut inter = vec![vec![vec![0.0; self.n]; self.l]; self.l];
        for block in self.inter {
            if block.from >= self.l || block.to >= self.l {
                return Err(bad(format!("inter-layer block ({}, {}) out of range", block.from, block.to)));
            }
            for (u, w) in block.weights {
                if u >= self.n {
                    return Err(bad(format!("inter-layer vertex {u} out of range")));
                }
                inter[block.from][block.to][u] = w;
            }
        }
        let super_adj = SuperAdjacency::from_parts(layers, &inter)?;
        Ok(LabeledSuper { super_adj, labels: self.labels, layer_names: self.layer_names })
    }
}
