//! Run configuration: a small TOML file plus a few flag overrides.  The
//! effective configuration (after overrides) is serialized canonically and
//! hashed, and that hash goes into every report, so identical inputs are
//! recognizable from the output alone.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use virial_core::numerics::{QuadMode, QuadratureSpec};
use virial_core::potential::{Beta, PairPotential};

/// A configuration problem: the offending key (best effort for parse
/// errors, exact for validation errors) and a message.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(k) => write!(f, "config key `{k}`: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: Some(key.to_string()),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Grid,
    MonteCarlo,
}

/// Default output format for commands that can emit either; a `--format`
/// flag overrides it per run.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_points")]
    pub points_per_panel: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
}

fn default_dimension() -> usize {
    1
}
fn default_mode() -> Mode {
    Mode::Grid
}
fn default_points() -> usize {
    8
}
fn default_samples() -> usize {
    20_000
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            dimension: default_dimension(),
            mode: default_mode(),
            points_per_panel: default_points(),
            samples: default_samples(),
            half_width: None,
        }
    }
}

impl QuadratureConfig {
    pub fn to_spec(&self, seed: u64) -> QuadratureSpec {
        QuadratureSpec {
            dimension: self.dimension,
            mode: match self.mode {
                Mode::Grid => QuadMode::Grid {
                    points_per_panel: self.points_per_panel,
                },
                Mode::MonteCarlo => QuadMode::MonteCarlo {
                    samples: self.samples,
                    seed,
                },
            },
            half_width: self.half_width,
        }
    }
}

/// Ceilings the run may not exceed; each is checked against the hard module
/// limit at load time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Max `whites + blacks` for symbolic kernel construction.
    #[serde(default = "default_symbolic")]
    pub symbolic: usize,
    /// Max admissible-family size accepted by numeric kernel sums.
    #[serde(default = "default_enumeration")]
    pub enumeration: usize,
    /// Max particle number for the exact reference solver.
    #[serde(default = "default_particles")]
    pub particles: usize,
    /// Max `m + n` for the counting tables.
    #[serde(default = "default_order")]
    pub order: u32,
}

fn default_symbolic() -> usize {
    virial_core::kernel::DEFAULT_SYMBOLIC_CAP
}
fn default_enumeration() -> usize {
    200_000
}
fn default_particles() -> usize {
    virial_core::oracle::ORACLE_PARTICLE_CAP
}
fn default_order() -> u32 {
    virial_core::counting::DEFAULT_ORDER_CAP
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            symbolic: default_symbolic(),
            enumeration: default_enumeration(),
            particles: default_particles(),
            order: default_order(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PairPotential>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub caps: Caps,
}

fn default_beta() -> f64 {
    1.0
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            beta: default_beta(),
            seed: 0,
            potential: None,
            format: OutputFormat::default(),
            quadrature: QuadratureConfig::default(),
            caps: Caps::default(),
        }
    }
}

/// Pull the first backtick-quoted identifier out of a toml error message;
/// that is where serde names the offending field.
fn quoted_key(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let rest = &message[start..];
    let end = rest.find('`')?;
    let key = &rest[..end];
    if key.is_empty() {
        None
    } else {
        Some(key.to_string())
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            key: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        let config: RunConfig = toml::from_str(&text).map_err(|e| {
            let message = e.message().to_string();
            ConfigError {
                key: quoted_key(&message),
                message,
            }
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.beta.is_finite() || self.beta <= 0.0 {
            return Err(bad("beta", format!("must be positive, got {}", self.beta)));
        }
        if let Some(pot) = &self.potential {
            pot.validate()
                .map_err(|e| bad("potential", e.to_string()))?;
        }
        let q = &self.quadrature;
        if !(1..=3).contains(&q.dimension) {
            return Err(bad(
                "quadrature.dimension",
                format!("must be 1, 2 or 3, got {}", q.dimension),
            ));
        }
        if q.points_per_panel < 2 {
            return Err(bad(
                "quadrature.points_per_panel",
                format!("must be at least 2, got {}", q.points_per_panel),
            ));
        }
        if q.samples < 2 {
            return Err(bad(
                "quadrature.samples",
                format!("must be at least 2, got {}", q.samples),
            ));
        }
        if let Some(h) = q.half_width {
            if !h.is_finite() || h <= 0.0 {
                return Err(bad(
                    "quadrature.half_width",
                    format!("must be positive, got {h}"),
                ));
            }
        }
        let caps = &self.caps;
        if caps.symbolic > virial_core::kernel::DEFAULT_SYMBOLIC_CAP {
            return Err(bad(
                "caps.symbolic",
                format!(
                    "exceeds the module limit {}",
                    virial_core::kernel::DEFAULT_SYMBOLIC_CAP
                ),
            ));
        }
        if caps.particles > virial_core::oracle::ORACLE_PARTICLE_CAP {
            return Err(bad(
                "caps.particles",
                format!(
                    "exceeds the module limit {}",
                    virial_core::oracle::ORACLE_PARTICLE_CAP
                ),
            ));
        }
        if caps.order > virial_core::counting::DEFAULT_ORDER_CAP {
            return Err(bad(
                "caps.order",
                format!(
                    "exceeds the module limit {}",
                    virial_core::counting::DEFAULT_ORDER_CAP
                ),
            ));
        }
        if caps.enumeration == 0 {
            return Err(bad("caps.enumeration", "must be positive"));
        }
        Ok(())
    }

    pub fn beta_checked(&self) -> Result<Beta, ConfigError> {
        Beta::new(self.beta).map_err(|e| bad("beta", e.to_string()))
    }

    pub fn potential_checked(&self) -> Result<&PairPotential, ConfigError> {
        self.potential.as_ref().ok_or_else(|| {
            bad(
                "potential",
                "this command needs a [potential] table in the config file",
            )
        })
    }

    /// Hash of the canonical JSON serialization of the effective config.
    pub fn sha256(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(&canonical);
        let digest = hasher.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            use std::fmt::Write;
            write!(out, "{byte:02x}").unwrap();
        }
        out
    }
}
