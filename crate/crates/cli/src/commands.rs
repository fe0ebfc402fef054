use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde_json::{json, Value};
use thiserror::Error;

use multinet::compose::{
    compose_distance, compose_ego, compose_multiplex, compose_stationary, temporal_distances, verify_ego_consistency,
    verify_layer_consistency, CompositionSpec, DistanceCoupling, DistanceKernel, EgoOptions, SuperAdjacency,
};
use multinet::io::{
    parse_distances, parse_egos, parse_layer_values, parse_layers, parse_pis, parse_super, read_dimacs_gr, read_layers,
    read_super, super_to_dot, write_layers, write_super, IoError, LabeledSuper, LayeredDataset,
};
use multinet::markov::{stationary, urw_transition};
use multinet::spectral::{bisect, conductance, cut_weight, layer_load, one_sided_conductance, scale_for_layer_load};
use multinet::{DynamicsParams, Error, ErrorKind, LayerGraph, RunConfig};

use crate::{emit, AnalyzeArgs, ComposeArgs, DynamicsArgs, IngestArgs, Kernel, Mode, TransformArgs, VerifyArgs};

const LOAD_SEARCH_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            CliError::Lib(e) => e.kind(),
            CliError::Usage(_) => ErrorKind::Validation,
        }
    }
}

macro_rules! impl_from_lib {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Lib(e.into())
            }
        }
    )*};
}

impl_from_lib!(
    IoError,
    multinet::ComposeError,
    multinet::GraphError,
    multinet::MarkovError,
    multinet::SpectralError,
    multinet::TransformError
);

fn required<'a>(file: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
    file.as_deref().ok_or_else(|| CliError::Usage(format!("this mode needs {flag}")))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File { path: path.to_path_buf(), source }.into())
}

/// Reads a layered file and attaches the dynamics given on the command line.
fn load_dataset(path: &Path, dynamics: &DynamicsArgs) -> Result<LayeredDataset, CliError> {
    let mut ds = read_layers(path)?;
    if dynamics.bias_file.is_none() && dynamics.delay_file.is_none() {
        return Ok(ds);
    }
    let values = |file: &Option<PathBuf>| -> Result<Vec<Vec<f64>>, CliError> {
        match file {
            Some(p) => Ok(parse_layer_values(&read_text(p)?, &ds, 1.0)?),
            None => Ok(vec![vec![1.0; ds.n()]; ds.l()]),
        }
    };
    let (bias, delay) = (values(&dynamics.bias_file)?, values(&dynamics.delay_file)?);
    ds.params = bias.into_iter().zip(delay).map(|(b, t)| DynamicsParams::new(b, t).map(Some)).collect::<Result<_, _>>()?;
    Ok(ds)
}

pub fn transform(_cfg: &RunConfig, args: TransformArgs) -> Result<ExitCode, CliError> {
    let ds = load_dataset(&args.layers, &args.dynamics)?;
    let out = LayeredDataset::new(ds.layer_names.clone(), ds.labels.clone(), ds.transformed()?)?;
    emit(args.output.as_deref(), &write_layers(&out))?;
    Ok(ExitCode::SUCCESS)
}

pub fn compose(cfg: &RunConfig, args: ComposeArgs) -> Result<ExitCode, CliError> {
    let ds = load_dataset(&args.layers, &args.dynamics)?;
    let layers = ds.transformed()?;
    let mut layer_names = ds.layer_names.clone();
    let s = match args.mode {
        Mode::Multiplex => {
            layer_names = vec!["multiplex".into()];
            SuperAdjacency::block_diagonal(vec![compose_multiplex(&layers)?])?
        }
        Mode::Ego => {
            let egos = parse_egos(&read_text(required(&args.ego_file, "--ego-file")?)?, &ds)?;
            let opts = EgoOptions {
                tol: cfg.verify.feasibility_tol,
                force_symmetric: args.force_symmetric || cfg.verify.force_symmetric,
            };
            compose_ego(&layers, &egos, &opts)?
        }
        Mode::Stationary => compose_stationary(&layers, &parse_pis(&read_text(required(&args.pi_file, "--pi-file")?)?, &ds)?)?,
        Mode::Distance => {
            let (distances, adjacent_only) = match &args.distances {
                Some(p) => (parse_distances(&read_text(p)?)?, args.adjacent_only),
                None => (temporal_distances(ds.l()), true),
            };
            let kernel = match args.kernel {
                Kernel::Reciprocal => DistanceKernel::Reciprocal,
                Kernel::Constant => DistanceKernel::Constant,
            };
            compose_distance(&layers, &DistanceCoupling { distances, coupling: args.coupling, kernel, adjacent_only })?
        }
    };
    log::info!("composed {} instances, {} entries", s.n() * s.l(), s.nnz());
    let labeled = LabeledSuper { super_adj: s, labels: ds.labels, layer_names };
    let path = args.output.or_else(|| cfg.output.super_path.clone());
    emit(path.as_deref(), &write_super(&labeled, args.format))?;
    Ok(ExitCode::SUCCESS)
}

pub fn verify(cfg: &RunConfig, args: VerifyArgs) -> Result<ExitCode, CliError> {
    let tol = args.tol.unwrap_or(cfg.verify.tol);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {tol}")));
    }
    let sup = read_super(&args.super_file)?;
    let ds = load_dataset(&args.layers, &args.dynamics)?;
    if sup.labels != ds.labels || sup.layer_names != ds.layer_names {
        return Err(CliError::Usage("vertex labels or layer names differ between the two files".into()));
    }
    let layers = ds.transformed()?;
    let layer_report = verify_layer_consistency(&sup.super_adj, &layers, tol)?;
    let ego_report = match &args.ego_file {
        Some(p) => Some(verify_ego_consistency(&sup.super_adj, &parse_egos(&read_text(p)?, &ds)?, tol)?),
        None => None,
    };
    let passed = layer_report.passed && ego_report.as_ref().is_none_or(|r| r.passed);
    let report = json!({ "passed": passed, "layer_consistency": layer_report, "ego_consistency": ego_report });
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(ErrorKind::Validation.exit_code() as u8) })
}

/// A super-adjacency file, or a layered dataset with its layers uncoupled.
fn load_network(path: &Path) -> Result<LabeledSuper, CliError> {
    let text = read_text(path)?;
    let head = text.trim_start();
    if head.starts_with("%%MatrixMarket") || head.starts_with('{') {
        return Ok(parse_super(&text)?);
    }
    let ds = parse_layers(&text)?;
    let s = SuperAdjacency::block_diagonal(ds.layers)?;
    Ok(LabeledSuper { super_adj: s, labels: ds.labels, layer_names: ds.layer_names })
}

pub fn analyze(cfg: &RunConfig, args: AnalyzeArgs) -> Result<ExitCode, CliError> {
    let net = load_network(&args.input)?;
    let s = &net.super_adj;
    let active = s.active_instances();
    let graph: LayerGraph = s.to_graph().induced(&active);
    let names: Vec<String> = active.iter().map(|&k| net.instance_name(k)).collect();
    if active.len() < s.n() * s.l() {
        log::info!("{} isolated instances left out of the analysis", s.n() * s.l() - active.len());
    }

    let mut report: BTreeMap<&str, Value> = BTreeMap::new();
    report.insert("instances", json!(s.n() * s.l()));
    report.insert("active_instances", json!(active.len()));
    let mut sides: Vec<Option<bool>> = vec![None; s.n() * s.l()];

    if args.bisect {
        let b = bisect(&graph, &cfg.eigen_options(), cfg.conductance)?;
        for (k, &flat) in active.iter().enumerate() {
            sides[flat] = Some(b.side[k]);
        }
        let members: Vec<&str> = names.iter().zip(&b.side).filter(|(_, &in_s)| in_s).map(|(n, _)| n.as_str()).collect();
        report.insert(
            "bisection",
            json!({
                "variant": b.variant,
                "conductance": b.conductance,
                "one_sided_conductance": b.one_sided_conductance,
                "cut": b.cut,
                "volume": b.volume,
                "complement_volume": b.complement_volume,
                "fiedler_value": b.fiedler_value,
                "size": b.size(),
                "side": members,
            }),
        );
    }

    if let Some(path) = &args.conductance {
        let wanted: Vec<String> = serde_json::from_str(&read_text(path)?).map_err(IoError::from)?;
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(k, n)| (n.as_str(), k)).collect();
        let mut side = vec![false; names.len()];
        for name in wanted {
            let k = *index.get(name.as_str()).ok_or(IoError::UnknownVertex(name))?;
            side[k] = true;
        }
        report.insert(
            "conductance",
            json!({
                "conductance": conductance(&graph, &side)?,
                "one_sided_conductance": one_sided_conductance(&graph, &side)?,
                "cut": cut_weight(&graph, &side)?,
            }),
        );
    }

    if args.layer_load {
        let load = layer_load(s)?;
        let by_name: BTreeMap<&str, f64> = net.layer_names.iter().map(String::as_str).zip(load.fractions).collect();
        report.insert("layer_load", json!(by_name));
    }
    if let (Some(target), Some(name)) = (args.load_target, &args.load_layer) {
        let layer = net
            .layer_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| IoError::UnknownLayerName(name.clone()))?;
        let factor = scale_for_layer_load(s, layer, target, LOAD_SEARCH_TOL)?;
        report.insert("load_scale", json!({ "layer": name, "target": target, "factor": factor }));
    }

    if args.stationary {
        let pi = stationary(&urw_transition(&graph)?, &cfg.stationary_options())?;
        let by_name: BTreeMap<&str, f64> = names.iter().map(String::as_str).zip(pi.pi.iter().copied()).collect();
        report.insert(
            "stationary",
            json!({ "pi": by_name, "iterations": pi.iterations, "residual": pi.residual, "damping": pi.damping }),
        );
    }

    if let Some(path) = args.dot.as_ref().or(cfg.output.dot.as_ref()) {
        emit(Some(path), &super_to_dot(&net, Some(&sides)))?;
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Some(path) = args.report.as_ref().or(cfg.output.report.as_ref()) {
        emit(Some(path), &text)?;
    }
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

pub fn ingest(cfg: &RunConfig, args: IngestArgs) -> Result<ExitCode, CliError> {
    let road = &cfg.road;
    let mut ds = read_dimacs_gr(&args.gr, &args.categories, &road.categories)?;
    let edges: Vec<usize> = ds.layers.iter().map(|g| g.edges().count()).collect();
    if road.highway_scale != 1.0 {
        ds.layers[1] = ds.layers[1].scaled(road.highway_scale);
    }
    if road.delay_kappa > 0.0 {
        ds.params = ds.layers.iter().map(|g| Some(DynamicsParams::degree_delay(g, road.delay_kappa))).collect();
    }
    let layers = ds.transformed()?;
    if let Some(share) = road.highway_share {
        let on_both = |u: usize| layers.iter().all(|g| g.out_degree(u) > 0.0);
        let pis = (0..ds.n()).map(|u| on_both(u).then(|| vec![1.0 - share, share])).collect();
        ds.composition = Some(CompositionSpec::Stationary(pis));
    }
    let spec = ds.composition.clone().unwrap_or(CompositionSpec::Multiplex);
    let s = multinet::compose(&layers, &spec)?;
    let load = layer_load(&s)?;

    let out = LayeredDataset::new(ds.layer_names.clone(), ds.labels.clone(), layers)?;
    if let Some(path) = &args.output {
        emit(Some(path), &write_layers(&out))?;
    }
    if let Some(path) = args.super_out.as_ref().or(cfg.output.super_path.as_ref()) {
        let labeled = LabeledSuper { super_adj: s, labels: ds.labels.clone(), layer_names: ds.layer_names.clone() };
        emit(Some(path), &write_super(&labeled, args.format))?;
    }
    let report = json!({
        "vertices": ds.n(),
        "edges": edges.iter().sum::<usize>(),
        "layer_edges": { "local": edges[0], "highway": edges[1] },
        "layer_load": { "local": load.fractions[0], "highway": load.fractions[1] },
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(ExitCode::SUCCESS)
}
