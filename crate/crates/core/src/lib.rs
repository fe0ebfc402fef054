//! Composition of multi-layer networks under a single random walk.
//!
//! The pipeline has two stages. Each layer is first turned into an
//! interaction matrix whose unbiased walk carries the layer's bias and
//! delay dynamics ([`transform`]). The layers are then assembled into one
//! `ln x ln` super-adjacency whose walk restricts to every layer's walk and
//! to the observed inter-layer switching ([`compose`]). [`spectral`]
//! analyzes the result and [`io`] reads and writes the file formats.
//!
//! ```
//! use multinet::{compose_ego, verify_ego_consistency, EgoMarkov, EgoOptions, LayerGraph};
//!
//! let phone = LayerGraph::from_edges(2, false, [(0, 1, 3.0)]).unwrap();
//! let email = LayerGraph::from_edges(2, false, [(0, 1, 1.0)]).unwrap();
//! // Columns are source layers: vertex 0 leaves the phone layer a quarter of the time.
//! let egos = vec![
//!     EgoMarkov::from_rows(0, &[vec![0.75, 0.5], vec![0.25, 0.5]]).unwrap(),
//!     EgoMarkov::identity(1, 2),
//! ];
//! let s = compose_ego(&[phone, email], &egos, &EgoOptions::default()).unwrap();
//! assert_eq!(s.inter_weight(0, 0, 1), 1.0);
//! assert!(verify_ego_consistency(&s, &egos, 1e-12).unwrap().passed);
//! ```

pub mod compose;
pub mod graph;
pub mod io;
pub mod markov;
pub mod spectral;
pub mod transform;

pub use compose::{
    check_undirected_feasibility, compose, compose_distance, compose_ego, compose_multiplex, compose_stationary,
    ego_block, ego_block_from_stationary, layer_degrees, verify_ego_consistency, verify_layer_consistency,
    ComposeError, CompositionSpec, DistanceCoupling, DistanceKernel, EgoBlock, EgoMarkov, EgoOptions, SuperAdjacency,
};
pub use graph::{DegreeVector, GraphError, LayerGraph};
pub use io::{IoError, LabeledSuper, LayeredDataset, RunConfig};
pub use markov::{
    is_detailed_balanced, reconstruct_adjacency, stationary, symmetrize_from_markov, urw_transition, MarkovError,
    StationaryDistribution, StationaryOptions, TransitionMatrix,
};
pub use spectral::{bisect, conductance, fiedler_vector, layer_load, sweep_cut, Bisection, LayerLoad, SpectralError};
pub use transform::{bias_transform, delay_transform, transform_layer, DynamicsParams, InteractionMatrix, TransformError};

use thiserror::Error;

/// Broad failure classes, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Invalid or infeasible input.
    Validation,
    /// Unreadable, unwritable or malformed files.
    Io,
    /// An iterative solver hit its cap.
    NoConvergence,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 1,
            ErrorKind::Io => 2,
            ErrorKind::NoConvergence => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Validation => "validation",
            ErrorKind::Io => "io",
            ErrorKind::NoConvergence => "no-convergence",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Config(#[from] io::ConfigError),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Markov(e) => markov_kind(e),
            Error::Transform(TransformError::Markov(e)) => markov_kind(e),
            Error::Compose(e) => compose_kind(e),
            Error::Spectral(SpectralError::NoConvergence { .. }) => ErrorKind::NoConvergence,
            Error::Io(IoError::Graph(_)) => ErrorKind::Validation,
            Error::Io(IoError::Compose(e)) => compose_kind(e),
            Error::Io(_) => ErrorKind::Io,
            Error::Config(io::ConfigError::Invalid(_) | io::ConfigError::Seed(_)) => ErrorKind::Validation,
            Error::Config(_) => ErrorKind::Io,
            _ => ErrorKind::Validation,
        }
    }
}

fn markov_kind(e: &MarkovError) -> ErrorKind {
    match e {
        MarkovError::NoConvergence { .. } => ErrorKind::NoConvergence,
        _ => ErrorKind::Validation,
    }
}

fn compose_kind(e: &ComposeError) -> ErrorKind {
    match e {
        ComposeError::NoConvergence { .. } => ErrorKind::NoConvergence,
        ComposeError::PerVertex(all) if all.iter().all(|(_, e)| matches!(e, ComposeError::NoConvergence { .. })) => {
            ErrorKind::NoConvergence
        }
        _ => ErrorKind::Validation,
    }
}
