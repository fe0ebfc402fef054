//! Graphviz export with bisection coloring.

use std::fmt::Write as _;

use super::LabeledSuper;
use crate::graph::LayerGraph;

const SIDE_COLORS: [&str; 2] = ["cyan", "red"];
const UNASSIGNED: &str = "gray";

fn color(sides: Option<&[Option<bool>]>, u: usize) -> &'static str {
    match sides.and_then(|s| s[u]) {
        Some(side) => SIDE_COLORS[usize::from(side)],
        None => UNASSIGNED,
    }
}

fn quote(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

/// `sides[u]`: `Some(true)` for `S`, `Some(false)` for the complement,
/// `None` for vertices left out of the analysis.
pub fn graph_to_dot(g: &LayerGraph, names: &[String], sides: Option<&[Option<bool>]>) -> String {
    let (kind, arrow) = if g.is_directed() { ("digraph", "->") } else { ("graph", "--") };
    let mut out = format!("{kind} multinet {{\n");
    for (u, name) in names.iter().enumerate() {
        writeln!(out, "  {} [color={}];", quote(name), color(sides, u)).unwrap();
    }
    let edges: Box<dyn Iterator<Item = (usize, usize, f64)>> = if g.is_directed() { Box::new(g.entries()) } else { Box::new(g.edges()) };
    for (u, v, w) in edges {
        writeln!(out, "  {} {arrow} {} [weight={w}];", quote(&names[u]), quote(&names[v])).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Instances are named `label@layer`; inter-layer edges are dashed.
pub fn super_to_dot(s: &LabeledSuper, sides: Option<&[Option<bool>]>) -> String {
    let sa = &s.super_adj;
    let flat = sa.to_graph();
    let directed = sa.is_directed();
    let (kind, arrow) = if directed { ("digraph", "->") } else { ("graph", "--") };
    let names: Vec<String> = (0..flat.n()).map(|k| s.instance_name(k)).collect();
    let mut out = format!("{kind} multinet {{\n");
    for (k, name) in names.iter().enumerate() {
        let (_, layer) = sa.instance(k);
        writeln!(out, "  {} [color={}, layer={}];", quote(name), color(sides, k), quote(&s.layer_names[layer])).unwrap();
    }
    for (a, b, w) in flat.entries() {
        if !directed && b < a {
            continue;
        }
        let style = if sa.instance(a).1 != sa.instance(b).1 { ", style=dashed" } else { "" };
        writeln!(out, "  {} {arrow} {} [weight={w}{style}];", quote(&names[a]), quote(&names[b])).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::SuperAdjacency;

    #[test]
    fn colors_and_edges() {
        let g = LayerGraph::from_edges(3, false, [(0, 1, 1.0), (1, 2, 2.5)]).unwrap();
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let dot = graph_to_dot(&g, &names, Some(&[Some(true), Some(false), None]));
        assert!(dot.starts_with("graph multinet {"));
        assert!(dot.contains("\"a\" [color=red];"));
        assert!(dot.contains("\"b\" [color=cyan];"));
        assert!(dot.contains("\"c\" [color=gray];"));
        assert!(dot.contains("\"b\" -- \"c\" [weight=2.5];"));
        assert_eq!(dot.matches("--").count(), 2);
    }

    #[test]
    fn super_graph_dashes_inter_layer_edges() {
        let g = LayerGraph::from_edges(2, false, [(0, 1, 1.0)]).unwrap();
        let mut s = SuperAdjacency::block_diagonal(vec![g.clone(), g]).unwrap();
        s.set_inter(0, 0, 1, 0.5).unwrap();
        s.set_inter(0, 1, 0, 0.5).unwrap();
        let dot = super_to_dot(&LabeledSuper::unlabeled(s), None);
        assert!(dot.contains("\"0@0\" -- \"0@1\" [weight=0.5, style=dashed];"));
        assert_eq!(dot.matches(" -- ").count(), 3);
    }
}
