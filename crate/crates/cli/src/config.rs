//! Experiment configuration files.

use std::fs;
use std::path::{Path, PathBuf};

use frame_forge::envelopes::{envelope_matrix, DecayEnvelope};
use frame_forge::frames::{build_perturbed_basis, FrameSystem, PerturbationSpec};
use frame_forge::hermite::TestFunction;
use frame_forge::io::load_frame;
use frame_forge::jaffard::JaffardParams;
use frame_forge::{GradedFamily, TruncatedMatrix, Weight};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MIN_N: usize = 16;

/// Matrices that can be named instead of loaded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NamedMatrix {
    Identity,
    Tridiagonal { sub: f64, diag: f64, sup: f64 },
    /// `e^{−γ|m−n|}`
    ExpDecay { gamma: f64 },
    /// `(min(m,n)/max(m,n))^γ`
    MinMax { gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Perturbation(PerturbationSpec),
    Named(NamedMatrix),
    /// Entries `C·envelope(m, n)`.
    Envelope(DecayEnvelope),
    /// Matrix file, relative to the config file.
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixFormat {
    Csv,
    Bin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: Option<SystemSpec>,
    /// Shorthand for `"system": {"file": …}`.
    pub matrix: Option<PathBuf>,
    #[serde(default = "default_n")]
    pub n: usize,
    pub margin: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_format")]
    pub format: MatrixFormat,
    /// Decay exponents for `fit`.
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default)]
    pub jaffard: JaffardParams,
    #[serde(default = "default_schur_p")]
    pub schur_p: Vec<f64>,
    #[serde(default = "default_family")]
    pub family: GradedFamily,
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
    #[serde(default = "default_test_function")]
    pub test_function: TestFunction,
    pub checkpoints: Option<Vec<usize>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub weight: Option<Weight>,
    #[serde(default = "two")]
    pub p: f64,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn default_n() -> usize {
    256
}
fn default_name() -> String {
    "system".into()
}
fn default_format() -> MatrixFormat {
    MatrixFormat::Csv
}
fn default_betas() -> Vec<f64> {
    vec![1.0]
}
fn default_schur_p() -> Vec<f64> {
    vec![2.0]
}
fn default_family() -> GradedFamily {
    GradedFamily::Poly
}
fn default_levels() -> Vec<f64> {
    vec![0.0, 1.0, 2.0, 3.0, 4.0]
}
fn default_test_function() -> TestFunction {
    TestFunction::gaussian(3.0)
}
fn default_samples() -> usize {
    500
}
fn default_trials() -> usize {
    1000
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let mut cfg: Self =
            serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < MIN_N {
            return Err(CliError::invalid(format!("n must be at least {MIN_N}, got {}", self.n)));
        }
        if self.system.is_some() && self.matrix.is_some() {
            return Err(CliError::invalid("give either system or matrix, not both"));
        }
        if self.levels.windows(2).any(|w| w[0] > w[1]) || self.levels.iter().any(|k| !(*k >= 0.0)) {
            return Err(CliError::invalid("levels must be nonnegative and sorted"));
        }
        Ok(())
    }

    pub fn system_spec(&self) -> Result<SystemSpec, CliError> {
        match (&self.system, &self.matrix) {
            (Some(s), _) => Ok(s.clone()),
            (None, Some(p)) => Ok(SystemSpec::File(p.clone())),
            (None, None) => Err(CliError::invalid("config has no system")),
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// The configured system; `dropped` counts perturbation terms cut by the truncation.
    pub fn build_system(&self) -> Result<(FrameSystem, usize), CliError> {
        let n = self.n;
        let (frame, dropped) = match self.system_spec()? {
            SystemSpec::Perturbation(spec) => {
                let b = build_perturbed_basis(&spec, n)?;
                (b.frame, b.dropped)
            }
            SystemSpec::Named(named) => {
                let a = match named {
                    NamedMatrix::Identity => TruncatedMatrix::identity(n),
                    NamedMatrix::Tridiagonal { sub, diag, sup } => TruncatedMatrix::tridiagonal(n, sub, diag, sup),
                    NamedMatrix::ExpDecay { gamma } => {
                        TruncatedMatrix::from_fn(n, |m, k| (-gamma * m.abs_diff(k) as f64).exp())?
                    }
                    NamedMatrix::MinMax { gamma } => {
                        TruncatedMatrix::from_fn(n, |m, k| (m.min(k) as f64 / m.max(k) as f64).powf(gamma))?
                    }
                };
                let label = serde_json::to_value(&named).ok().and_then(|v| v["kind"].as_str().map(String::from));
                (FrameSystem::new(a, label.unwrap_or_default()), 0)
            }
            SystemSpec::Envelope(env) => (FrameSystem::new(envelope_matrix(&env, n)?, "envelope"), 0),
            SystemSpec::File(p) => {
                let path = self.resolve(&p);
                let e = load_frame(&path).map_err(|e| CliError::load(&path, e))?;
                (e, 0)
            }
        };
        let frame = match self.margin {
            Some(m) => FrameSystem::new(frame.coeffs().clone().with_margin(m)?, frame.label().to_string()),
            None => frame,
        };
        Ok((frame, dropped))
    }

    pub fn seed(&self, cli_seed: Option<u64>) -> Result<u64, CliError> {
        cli_seed.or(self.seed).ok_or_else(|| CliError::invalid("this command is randomized and needs a seed"))
    }

    /// Checkpoints `1, 2, 4, …, N` unless configured.
    pub fn checkpoints(&self, n: usize) -> Vec<usize> {
        self.checkpoints.clone().unwrap_or_else(|| {
            let mut v: Vec<usize> = std::iter::successors(Some(1usize), |m| Some(m * 2)).take_while(|&m| m < n).collect();
            v.push(n);
            v
        })
    }
}
