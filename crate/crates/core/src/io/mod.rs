//! File formats, dataset ingestion and run configuration.

mod companion;
mod config;
mod dimacs;
mod dot;
mod layered;
mod super_format;

pub use companion::{parse_distances, parse_egos, parse_layer_values, parse_pis};
pub use config::{ConfigError, EigenConfig, OutputConfig, RoadConfig, RunConfig, StationaryConfig, VerifyConfig, SEED_ENV};
pub use dimacs::{parse_dimacs_gr, read_dimacs_gr, CategoryMap, RoadWeighting};
pub use dot::{graph_to_dot, super_to_dot};
pub use layered::{parse_layers, read_layers, write_layers, LayeredDataset};
pub use super_format::{parse_super, read_super, write_super, LabeledSuper, SuperFormat};

use std::path::PathBuf;

use thiserror::Error;

use crate::compose::ComposeError;
use crate::graph::GraphError;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: edge ({u}, {v}) given twice in layer `{layer}`")]
    DuplicateEdge { line: usize, layer: String, u: String, v: String },
    #[error("line {line}: undeclared layer `{name}`")]
    UnknownLayer { line: usize, name: String },
    #[error("line {line}: layer `{name}` declared twice")]
    DuplicateLayer { line: usize, name: String },
    #[error("unknown vertex label `{0}`")]
    UnknownVertex(String),
    #[error("unknown layer `{0}`")]
    UnknownLayerName(String),
    #[error("arc ({u}, {v}) has no road category")]
    MissingCategory { u: String, v: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File { path: path.to_path_buf(), source })
}

/// Writes `contents` to `path`, naming the path on failure.
pub fn write_text(path: &std::path::Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|source| IoError::File { path: path.to_path_buf(), source })
}

fn parse_weight(line: usize, token: &str) -> Result<f64, IoError> {
    let w: f64 = token.parse().map_err(|_| IoError::Parse { line, reason: format!("bad weight `{token}`") })?;
    if !w.is_finite() || w < 0.0 {
        return Err(IoError::Parse { line, reason: format!("weight `{token}` must be finite and non-negative") });
    }
    Ok(w)
}
