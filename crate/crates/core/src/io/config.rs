//! Run configuration read from TOML.
//!
//! Every field has a default, so an empty file (or no file) is valid.
//! The environment variable `MULTINET_SEED` overrides `seed`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dimacs::CategoryMap;
use crate::markov::StationaryOptions;
use crate::spectral::{ConductanceVariant, EigenOptions};

pub const SEED_ENV: &str = "MULTINET_SEED";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{SEED_ENV} must be an unsigned integer, got `{0}`")]
    Seed(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub conductance: ConductanceVariant,
    pub stationary: StationaryConfig,
    pub eigen: EigenConfig,
    pub verify: VerifyConfig,
    pub road: RoadConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            conductance: ConductanceVariant::Symmetric,
            stationary: StationaryConfig::default(),
            eigen: EigenConfig::default(),
            verify: VerifyConfig::default(),
            road: RoadConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationaryConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub fallback_damping: Option<f64>,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        let o = StationaryOptions::default();
        Self { tol: o.tol, max_iter: o.max_iter, damping: o.damping, fallback_damping: o.fallback_damping }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        let o = EigenOptions::default();
        Self { tol: o.tol, max_iter: o.max_iter }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Consistency tolerance.
    pub tol: f64,
    /// Asymmetry allowed in undirected ego composition.
    pub feasibility_tol: f64,
    /// Average infeasible undirected ego blocks instead of failing.
    pub force_symmetric: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { tol: 1e-10, feasibility_tol: 1e-10, force_symmetric: false }
    }
}

/// Road-network scenario knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoadConfig {
    pub categories: CategoryMap,
    /// Factor applied to the highway layer before composition.
    pub highway_scale: f64,
    /// Delay `tau_u = 1 + kappa * deg_u`; zero disables delays.
    pub delay_kappa: f64,
    /// Highway share of the layer distribution at vertices on both layers;
    /// `None` keeps the plain link weights.
    pub highway_share: Option<f64>,
}

impl Default for RoadConfig {
    fn default() -> Self {
        Self { categories: CategoryMap::default(), highway_scale: 1.0, delay_kappa: 0.0, highway_share: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub super_path: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub dot: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path` (defaults when `None`) and applies the seed override.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Read { path: p.to_path_buf(), source })?;
                Self::from_toml(&text)?
            }
            None => Self::default(),
        };
        cfg.apply_seed_override(std::env::var(SEED_ENV).ok().as_deref())?;
        Ok(cfg)
    }

    pub fn apply_seed_override(&mut self, value: Option<&str>) -> Result<(), ConfigError> {
        if let Some(v) = value {
            self.seed = v.trim().parse().map_err(|_| ConfigError::Seed(v.to_string()))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("stationary.tol", self.stationary.tol),
            ("eigen.tol", self.eigen.tol),
            ("verify.tol", self.verify.tol),
            ("verify.feasibility_tol", self.verify.feasibility_tol),
            ("road.highway_scale", self.road.highway_scale),
            ("road.categories.highway_weight", self.road.categories.highway_weight),
            ("road.categories.local_weight", self.road.categories.local_weight),
            ("road.categories.link_weight", self.road.categories.link_weight),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ConfigError::Invalid(format!("{name} must be positive, got {value}")));
            }
        }
        if self.stationary.max_iter == 0 || self.eigen.max_iter == 0 {
            return Err(ConfigError::Invalid("iteration caps must be positive".into()));
        }
        for d in std::iter::once(self.stationary.damping).chain(self.stationary.fallback_damping) {
            if !(0.0..1.0).contains(&d) {
                return Err(ConfigError::Invalid(format!("damping must lie in [0, 1), got {d}")));
            }
        }
        if !(self.road.delay_kappa.is_finite() && self.road.delay_kappa >= 0.0) {
            return Err(ConfigError::Invalid("road.delay_kappa must be non-negative".into()));
        }
        if let Some(share) = self.road.highway_share {
            if !(share > 0.0 && share < 1.0) {
                return Err(ConfigError::Invalid("road.highway_share must lie in (0, 1)".into()));
            }
        }
        Ok(())
    }

    pub fn stationary_options(&self) -> StationaryOptions {
        StationaryOptions {
            tol: self.stationary.tol,
            max_iter: self.stationary.max_iter,
            damping: self.stationary.damping,
            fallback_damping: self.stationary.fallback_damping,
            start: None,
        }
    }

    pub fn eigen_options(&self) -> EigenOptions {
        EigenOptions { tol: self.eigen.tol, max_iter: self.eigen.max_iter, seed: self.seed }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = RunConfig::from_toml("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.eigen_options(), EigenOptions::default());
    }

    #[test]
    fn nested_sections() {
        let cfg = RunConfig::from_toml(
            "seed = 7\nconductance = \"one-sided\"\n[road]\nhighway_scale = 2.5\n[road.categories]\nweighting = \"arc\"\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.conductance, ConductanceVariant::OneSided);
        assert_eq!(cfg.road.highway_scale, 2.5);
        assert_eq!(cfg.road.categories.highway_classes, ["A1", "A2", "A3"]);
    }

    #[test]
    fn invalid_values() {
        assert!(matches!(RunConfig::from_toml("[eigen]\ntol = 0.0\n"), Err(ConfigError::Invalid(_))));
        assert!(matches!(RunConfig::from_toml("[stationary]\ndamping = 1.0\n"), Err(ConfigError::Invalid(_))));
        assert!(matches!(RunConfig::from_toml("bogus = 1\n"), Err(ConfigError::Toml(_))));
    }

    #[test]
    fn seed_override() {
        let mut cfg = RunConfig::default();
        cfg.apply_seed_override(Some("9")).unwrap();
        assert_eq!(cfg.seed, 9);
        assert!(matches!(cfg.apply_seed_override(Some("x")), Err(ConfigError::Seed(_))));
    }
}
