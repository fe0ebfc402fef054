use serde::{Deserialize, Serialize};

use super::fiedler::{fiedler_vector, EigenOptions};
use super::{undirected_view, SpectralError};
use crate::graph::LayerGraph;

/// Denominator of the conductance minimized by the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConductanceVariant {
    /// `cut(S) / min(vol S, vol S')`.
    #[default]
    Symmetric,
    /// `cut(S) / vol S`.
    OneSided,
}

impl ConductanceVariant {
    fn eval(self, cut: f64, vol_s: f64, vol_rest: f64) -> f64 {
        match self {
            ConductanceVariant::Symmetric => cut / vol_s.min(vol_rest),
            ConductanceVariant::OneSided => cut / vol_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bisection {
    /// `true` for members of `S`.
    pub side: Vec<bool>,
    pub variant: ConductanceVariant,
    /// Minimized value, recomputed from the graph for the chosen side.
    pub conductance: f64,
    /// `cut(S) / vol S` for the same side.
    pub one_sided_conductance: f64,
    pub cut: f64,
    pub volume: f64,
    pub complement_volume: f64,
    /// Conductance of every proper prefix of the order, `k = 1..n-1`.
    pub sweep_profile: Vec<f64>,
    pub order: Vec<usize>,
    /// Number of vertices in `S`, a prefix of `order`.
    pub split: usize,
    pub fiedler_value: Option<f64>,
}

impl Bisection {
    pub fn size(&self) -> usize {
        self.split
    }
}

/// Vertices sorted by ascending value, ties by index.
pub fn fiedler_order(x: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    order
}

/// Best prefix set of `order` under `variant`.
pub fn sweep_cut(g: &LayerGraph, order: &[usize], variant: ConductanceVariant) -> Result<Bisection, SpectralError> {
    let g = undirected_view(g);
    let n = g.n();
    if n < 2 {
        return Err(SpectralError::TooSmall(n));
    }
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&u| u >= n || std::mem::replace(&mut seen[u], true)) {
        return Err(SpectralError::InvalidOrder(n));
    }
    let components = g.components();
    if components.len() > 1 {
        return Err(SpectralError::Disconnected { components });
    }
    let degrees = g.out_degrees();
    let total: f64 = degrees.iter().sum();

    let mut in_s = vec![false; n];
    let (mut cut, mut vol) = (0.0, 0.0);
    let mut profile = Vec::with_capacity(n - 1);
    for &u in &order[..n - 1] {
        let (mut to_s, mut looped) = (0.0, 0.0);
        for (v, w) in g.out_edges(u) {
            if v == u {
                looped += w;
            } else if in_s[v] {
                to_s += w;
            }
        }
        cut += degrees[u] - looped - 2.0 * to_s;
        vol += degrees[u];
        in_s[u] = true;
        profile.push(variant.eval(cut, vol, total - vol));
    }
    let best = profile
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(k, _)| k + 1)
        .expect("n >= 2");

    let mut side = vec![false; n];
    order[..best].iter().for_each(|&u| side[u] = true);
    let (cut, volume, complement_volume) = evaluate(&g, &side);
    Ok(Bisection {
        side,
        variant,
        conductance: variant.eval(cut, volume, complement_volume),
        one_sided_conductance: cut / volume,
        cut,
        volume,
        complement_volume,
        sweep_profile: profile,
        order: order.to_vec(),
        split: best,
        fiedler_value: None,
    })
}

/// Sweep along the Fiedler order.
pub fn bisect(g: &LayerGraph, opts: &EigenOptions, variant: ConductanceVariant) -> Result<Bisection, SpectralError> {
    let g = undirected_view(g);
    let pair = fiedler_vector(&g, opts)?;
    let mut b = sweep_cut(&g, &fiedler_order(&pair.vector), variant)?;
    b.fiedler_value = Some(pair.value);
    Ok(b)
}

/// `cut(S) / min(vol S, vol S')`.
pub fn conductance(g: &LayerGraph, side: &[bool]) -> Result<f64, SpectralError> {
    let (cut, a, b) = checked(g, side)?;
    Ok(ConductanceVariant::Symmetric.eval(cut, a, b))
}

/// `cut(S) / vol S`.
pub fn one_sided_conductance(g: &LayerGraph, side: &[bool]) -> Result<f64, SpectralError> {
    let (cut, a, b) = checked(g, side)?;
    Ok(ConductanceVariant::OneSided.eval(cut, a, b))
}

/// Total weight of edges with exactly one endpoint in `S`.
pub fn cut_weight(g: &LayerGraph, side: &[bool]) -> Result<f64, SpectralError> {
    checked(g, side).map(|(cut, _, _)| cut)
}

fn checked(g: &LayerGraph, side: &[bool]) -> Result<(f64, f64, f64), SpectralError> {
    if side.len() != g.n() {
        return Err(SpectralError::SideLength { expected: g.n(), actual: side.len() });
    }
    if side.iter().all(|&s| s) || side.iter().all(|&s| !s) {
        return Err(SpectralError::EmptySide);
    }
    Ok(evaluate(&undirected_view(g), side))
}

/// `(cut, vol S, vol S')` from scratch; volumes include self-loops.
fn evaluate(g: &LayerGraph, side: &[bool]) -> (f64, f64, f64) {
    let (mut cut, mut vol_s, mut vol_rest) = (0.0, 0.0, 0.0);
    for (u, v, w) in g.entries() {
        if side[u] {
            vol_s += w;
            if !side[v] {
                cut += w;
            }
        } else {
            vol_rest += w;
        }
    }
    (cut, vol_s, vol_rest)
}
