//! Experiment configuration files.
//!
//! Every object is parsed strictly: unknown keys are an error.

use std::fmt;
use std::path::{Path, PathBuf};

use kaczlab_core::testbed::random_unit_vector;
use kaczlab_core::{AtomicMeasure, MomentSource, NoiseProfile, SpectralVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; must name the experiment given on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    pub measure: MomentSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseProfile>,
    /// CSV with header `index,re,im`, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_vector: Option<TruthSpec>,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_grid: Option<Vec<f64>>,
    /// Period `N` of a truncated system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    /// Truncation levels for the accuracy/noise trade-off table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cycles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Series degree for evaluating noise inside the disc.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// Either explicit values or `"random(<seed>)"`; a bare `"random"` takes
/// `parameters.seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TruthRepr", into = "TruthRepr")]
pub enum TruthSpec {
    Values(SpectralVector),
    Random(Option<u64>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TruthRepr {
    Values(Vec<Complex64>),
    Text(String),
}

#[derive(Debug)]
struct BadTruth(String);

impl fmt::Display for BadTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "truth_vector must be a list of [re, im] pairs, \"random\" or \"random(<seed>)\", got {:?}",
            self.0
        )
    }
}

impl TryFrom<TruthRepr> for TruthSpec {
    type Error = BadTruth;

    fn try_from(repr: TruthRepr) -> Result<Self, BadTruth> {
        match repr {
            TruthRepr::Values(v) => Ok(Self::Values(SpectralVector::new(v))),
            TruthRepr::Text(s) => {
                let t = s.trim();
                if t == "random" {
                    return Ok(Self::Random(None));
                }
                t.strip_prefix("random(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .and_then(|seed| seed.trim().parse().ok())
                    .map(|seed| Self::Random(Some(seed)))
                    .ok_or(BadTruth(s))
            }
        }
    }
}

impl From<TruthSpec> for TruthRepr {
    fn from(t: TruthSpec) -> Self {
        match t {
            TruthSpec::Values(v) => Self::Values(v.values().to_vec()),
            TruthSpec::Random(None) => Self::Text("random".into()),
            TruthSpec::Random(Some(seed)) => Self::Text(format!("random({seed})")),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(file) = &config.noise_file {
            if file.is_relative() {
                let base = path.parent().unwrap_or(Path::new(""));
                config.noise_file = Some(base.join(file));
            }
        }
        Ok(config)
    }

    pub fn atomic(&self) -> Result<&AtomicMeasure, CliError> {
        self.measure
            .as_atomic()
            .ok_or_else(|| CliError::Config("this experiment needs an atomic measure".into()))
    }

    pub fn noise_profile(&self) -> Result<Option<NoiseProfile>, CliError> {
        match (&self.noise, &self.noise_file) {
            (Some(_), Some(_)) => Err(CliError::Config("give either noise or noise_file, not both".into())),
            (Some(p), None) => Ok(Some(p.clone())),
            (None, Some(file)) => {
                let f = std::fs::File::open(file).map_err(|e| CliError::io(file, e))?;
                let coeffs = kaczlab_core::noise::read_coefficients_csv(f)
                    .map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
                Ok(Some(NoiseProfile::Explicit { coeffs }))
            }
            (None, None) => Ok(None),
        }
    }

    /// The truth vector; zero when none is configured.
    pub fn truth(&self, m: &AtomicMeasure) -> Result<SpectralVector, CliError> {
        match &self.truth_vector {
            None => Ok(SpectralVector::zeros(m.dim())),
            Some(TruthSpec::Values(v)) => {
                v.check_dim(m.dim())
                    .map_err(|e| CliError::Config(format!("truth_vector: {e}")))?;
                Ok(v.clone())
            }
            Some(TruthSpec::Random(seed)) => {
                let seed = seed.or(self.parameters.seed).ok_or_else(|| {
                    CliError::Config("truth_vector \"random\" needs parameters.seed or --seed".into())
                })?;
                Ok(random_unit_vector(m, seed))
            }
        }
    }

    /// Range checks that do not depend on the experiment.
    pub fn validate(&self) -> Result<(), CliError> {
        let p = &self.parameters;
        if let Some(noise) = &self.noise {
            noise.validate().map_err(|e| CliError::Config(format!("noise: {e}")))?;
        }
        if let Some(grid) = &p.r_grid {
            if grid.is_empty() || grid.iter().any(|&r| !(0.0..1.0).contains(&r)) {
                return Err(CliError::Config(format!(
                    "r_grid values must lie in [0, 1), got {grid:?}"
                )));
            }
            if grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::Config("r_grid must be strictly increasing".into()));
            }
        }
        if let Some(grid) = &p.omega_grid {
            if grid.is_empty() || grid.iter().any(|&w| !(w > 0.0 && w < 2.0)) {
                return Err(CliError::Config(format!(
                    "omega_grid values must lie in (0, 2), got {grid:?}"
                )));
            }
            if grid.windows(2).any(|w| w[1] >= w[0]) {
                return Err(CliError::Config("omega_grid must be strictly decreasing".into()));
            }
        }
        if let Some(tol) = p.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Config(format!("tol must be positive, got {tol}")));
            }
        }
        for (name, value) in [("period", p.period), ("cycles", p.cycles), ("max_cycles", p.max_cycles)] {
            if value == Some(0) {
                return Err(CliError::Config(format!("{name} must be at least 1")));
            }
        }
        if let Some(levels) = &p.levels {
            if levels.is_empty() || levels.contains(&0) {
                return Err(CliError::Config(
                    "levels must be a non-empty list of positive integers".into(),
                ));
            }
        }
        Ok(())
    }
}
