//! Run configuration, validation, and the manifest written next to data.

use std::fmt;
use std::path::Path;

use anyhow::Context;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use djcm::analytic::SeriesConfig;
use djcm::hilbert::FockSpace;
use djcm::model::DrivenParams;

pub const CSV_SCHEMA: &str = "djcm-csv v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Driven,
    Standard,
    Dispersive,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Driven => "driven",
            Mode::Standard => "standard",
            Mode::Dispersive => "dispersive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Analytic,
    Frame,
    Rk4,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Engine::Analytic => "analytic",
            Engine::Frame => "frame",
            Engine::Rk4 => "rk4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Inversion,
    Nphoton,
    Mandelq,
    Entropy,
    Invariant,
}

impl Observable {
    pub fn file_stem(&self) -> &'static str {
        match self {
            Observable::Inversion => "inversion",
            Observable::Nphoton => "nphoton",
            Observable::Mandelq => "mandelq",
            Observable::Entropy => "entropy",
            Observable::Invariant => "invariant",
        }
    }
}

/// Flat run description; the JSON config file carries exactly these fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub omega_c: f64,
    pub omega_eg: f64,
    pub g: f64,
    #[serde(default)]
    pub zeta: f64,
    #[serde(default)]
    pub xi: f64,
    #[serde(default)]
    pub beta_re: f64,
    #[serde(default)]
    pub beta_im: f64,
    /// Relative phase of the atomic superposition (dispersive mode only).
    #[serde(default)]
    pub phi: f64,
    pub t_max: f64,
    pub steps: usize,
    /// Fock truncation; derived from the coherent amplitude when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default = "default_engine")]
    pub engine: Engine,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
}

fn default_engine() -> Engine {
    Engine::Analytic
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::Inversion]
}

/// A configuration problem; reported verbatim and mapped to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&raw)
            .map_err(|e| ConfigError(format!("config {} is invalid: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn beta(&self) -> Complex64 {
        Complex64::new(self.beta_re, self.beta_im)
    }

    /// Check the declared invariants; returns the violated constraint.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.steps < 2 {
            return Err(ConfigError("steps must be >= 2".into()));
        }
        if self.t_max <= 0.0 || self.t_max.is_nan() {
            return Err(ConfigError("t_max must be > 0".into()));
        }
        if self.g <= 0.0 {
            return Err(ConfigError("g must be > 0".into()));
        }
        match self.mode {
            Mode::Driven => {
                if self.zeta <= 0.0 || self.xi <= 0.0 {
                    return Err(ConfigError("driven mode requires zeta, xi > 0".into()));
                }
            }
            Mode::Standard => {
                if self.zeta != 0.0 || self.xi != 0.0 {
                    return Err(ConfigError("standard mode requires zeta = xi = 0".into()));
                }
            }
            Mode::Dispersive => {
                let both_zero = self.zeta == 0.0 && self.xi == 0.0;
                let both_positive = self.zeta > 0.0 && self.xi > 0.0;
                if !(both_zero || both_positive) {
                    return Err(ConfigError(
                        "dispersive mode requires zeta, xi > 0 (driven) or zeta = xi = 0".into(),
                    ));
                }
            }
        }
        if let Some(dim) = self.dim {
            if dim < 2 {
                return Err(ConfigError("dim must be >= 2".into()));
            }
        }
        if self.observables.is_empty() {
            return Err(ConfigError("observables must be non-empty".into()));
        }
        Ok(())
    }

    /// Build the physical parameter set, enforcing the mode constraints.
    pub fn params(&self) -> Result<DrivenParams, ConfigError> {
        let p = match self.mode {
            Mode::Standard => DrivenParams::standard(self.omega_c, self.omega_eg, self.g),
            Mode::Driven | Mode::Dispersive => {
                if self.zeta == 0.0 && self.xi == 0.0 {
                    DrivenParams::standard(self.omega_c, self.omega_eg, self.g)
                } else {
                    DrivenParams::from_free(self.omega_c, self.omega_eg, self.g, self.zeta, self.xi)
                }
            }
        }
        .map_err(|e| ConfigError(e.to_string()))?;
        if self.mode == Mode::Dispersive {
            let delta = p.delta().abs();
            if delta < 10.0 * p.g() {
                return Err(ConfigError(format!(
                    "dispersive mode requires |Delta| >= 10 g (got |Delta| = {delta}, g = {})",
                    p.g()
                )));
            }
        }
        Ok(p)
    }

    pub fn fock_space(&self, p: &DrivenParams) -> Result<FockSpace, ConfigError> {
        match self.dim {
            Some(dim) => FockSpace::new(dim).map_err(|e| ConfigError(e.to_string())),
            None => Ok(p.auto_fock_space(self.beta())),
        }
    }

    pub fn time_grid(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|k| self.t_max * k as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// Everything needed to reproduce a run, written as `manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: String,
    pub csv_schema: &'static str,
    pub config: RunConfig,
    pub derived: DerivedQuantities,
    pub duration_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivedQuantities {
    pub omega_0: f64,
    pub alpha: f64,
    pub delta_c: f64,
    pub delta_eg: f64,
    pub delta: f64,
    pub dim: usize,
    /// Poisson support bound of the observable series at the default tail.
    pub n_max: usize,
    /// Constant energy offset dropped from the displaced-frame Hamiltonian.
    pub dropped_energy_offset: f64,
}

impl DerivedQuantities {
    pub fn new(cfg: &RunConfig, p: &DrivenParams, dim: usize) -> Self {
        let gamma = cfg.beta() + Complex64::new(p.alpha(), 0.0);
        Self {
            omega_0: p.omega_0(),
            alpha: p.alpha(),
            delta_c: p.delta_c(),
            delta_eg: p.delta_eg(),
            delta: p.delta(),
            dim,
            n_max: SeriesConfig::default().n_max(gamma),
            dropped_energy_offset: p.dropped_energy_offset(),
        }
    }
}
