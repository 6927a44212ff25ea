//! Run configuration documents.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::Shortcut;
use crate::engine::{Caps, Model};
use crate::error::{Result, SimError};
use crate::kernels::{
    ArModel, BinaryAr, Coefficients, DampingFn, GrowthFn, Kernel, MajorityKernel, MarkovEmbedded, ParityAr,
    ProportionKernel, RenewalMixture, RenewalWeights, RunLengthKernel, SignChangeKernel, WindowFn,
};
use crate::skeletons::Skeleton;
use crate::Symbol;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArParams {
    pub intercept: f64,
    pub coefficients: Coefficients,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    Markov {
        order: usize,
        alphabet: usize,
        table: Vec<Vec<f64>>,
    },
    BinaryAr {
        intercept: f64,
        coefficients: Coefficients,
    },
    ParityAr {
        standard: ArParams,
        alternative: ArParams,
    },
    Proportion {
        b1: f64,
        c: f64,
        sigma: f64,
        beta: Coefficients,
        gamma: Coefficients,
    },
    Renewal {
        epsilon: f64,
        weights: RenewalWeights,
    },
    Majority {
        window: WindowFn,
        eps_odd: f64,
        eps_even: f64,
        epsilon: f64,
        p_inf: f64,
    },
    RunLength {
        epsilon: f64,
        growth: GrowthFn,
    },
    SignChange {
        coefficients: Coefficients,
        damping: DampingFn,
        beta: f64,
    },
}

impl KernelConfig {
    pub fn build(&self) -> Result<Arc<dyn Kernel>> {
        Ok(match self.clone() {
            KernelConfig::Markov { order, alphabet, table } => Arc::new(MarkovEmbedded::new(order, alphabet, table)?),
            KernelConfig::BinaryAr { intercept, coefficients } => Arc::new(BinaryAr::new(intercept, coefficients)?),
            KernelConfig::ParityAr { standard, alternative } => Arc::new(ParityAr::new(
                ArModel::new(standard.intercept, standard.coefficients, "parity_ar")?,
                ArModel::new(alternative.intercept, alternative.coefficients, "parity_ar")?,
            )?),
            KernelConfig::Proportion { b1, c, sigma, beta, gamma } => {
                Arc::new(ProportionKernel::new(b1, c, sigma, beta, gamma)?)
            }
            KernelConfig::Renewal { epsilon, weights } => Arc::new(RenewalMixture::new(epsilon, weights)?),
            KernelConfig::Majority {
                window,
                eps_odd,
                eps_even,
                epsilon,
                p_inf,
            } => Arc::new(MajorityKernel::new(window, eps_odd, eps_even, epsilon, p_inf)?),
            KernelConfig::RunLength { epsilon, growth } => Arc::new(RunLengthKernel::new(epsilon, growth)?),
            KernelConfig::SignChange {
                coefficients,
                damping,
                beta,
            } => Arc::new(SignChangeKernel::new(coefficients, damping, beta)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SkeletonConfig {
    Empty,
    Renewal,
    TerminalString { word: Vec<Symbol> },
    Proportion { sigma: f64 },
    RunBoundary,
}

impl SkeletonConfig {
    pub fn build(&self) -> Result<Skeleton> {
        match self {
            SkeletonConfig::Empty => Ok(Skeleton::Empty),
            SkeletonConfig::Renewal => Ok(Skeleton::renewal()),
            SkeletonConfig::TerminalString { word } => Skeleton::terminal_string(word.clone()),
            SkeletonConfig::Proportion { sigma } => Skeleton::proportion(*sigma),
            SkeletonConfig::RunBoundary => Ok(Skeleton::RunBoundary),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    #[serde(default = "default_max_blocks")]
    pub max_blocks: u64,
}

fn default_max_steps() -> u64 {
    Caps::default().max_steps
}

fn default_max_blocks() -> u64 {
    Caps::default().max_blocks
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            max_steps: default_max_steps(),
            max_blocks: default_max_blocks(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub seed: u64,
    /// Inclusive seed range `A..B`; overrides `seed` and `replicas`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<String>,
    /// Inclusive time window `M..N`.
    #[serde(default = "default_window")]
    pub window: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicas: Option<u64>,
    #[serde(default = "default_max_n")]
    pub max_n: u64,
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default)]
    pub shortcut: Shortcut,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_probe_depth")]
    pub probe_depth: usize,
}

fn default_window() -> String {
    "0..0".into()
}
fn default_max_n() -> u64 {
    50
}
fn default_level() -> f64 {
    0.99
}
fn default_horizon() -> usize {
    1000
}
fn default_samples() -> u64 {
    20_000
}
fn default_probe_depth() -> usize {
    3
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: 0,
            seeds: None,
            window: default_window(),
            replicas: None,
            max_n: default_max_n(),
            level: default_level(),
            horizon: default_horizon(),
            shortcut: Shortcut::default(),
            samples: default_samples(),
            probe_depth: default_probe_depth(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema")]
    pub schema_version: u32,
    pub kernel: KernelConfig,
    /// Defaults to the kernel's own skeleton.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skeleton: Option<SkeletonConfig>,
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default)]
    pub run: RunSection,
}

fn schema() -> u32 {
    SCHEMA_VERSION
}

/// Parses `A..B` (inclusive on both ends).
pub fn parse_range(s: &str) -> Result<(i64, i64)> {
    let bad = || SimError::InvalidArgument(format!("expected a range A..B, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(SimError::InvalidArgument(format!("range {s:?} is empty")));
    }
    Ok((a, b))
}

impl RunConfig {
    /// Reads a config, or the `config` table echoed in an output document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let value: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| SimError::InvalidArgument(format!("config: {}", e.message())))?;
        let value = match value.get("config") {
            Some(toml::Value::Table(t)) if !value.contains_key("kernel") => t.clone(),
            _ => value,
        };
        let cfg: RunConfig = value
            .try_into()
            .map_err(|e: toml::de::Error| SimError::InvalidArgument(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything that can be checked without running: ranges parse,
    /// parameters lie in their family domains, the pairing is supported.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SimError::InvalidArgument(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        parse_range(&self.run.window)?;
        if let Some(s) = &self.run.seeds {
            let (a, _) = parse_range(s)?;
            if a < 0 {
                return Err(SimError::InvalidArgument("seeds must be nonnegative".into()));
            }
        }
        if !(self.run.level > 0.0 && self.run.level < 1.0) {
            return Err(SimError::InvalidArgument("level must lie in (0, 1)".into()));
        }
        self.model().map(|_| ())
    }

    pub fn model(&self) -> Result<Model> {
        let kernel = self.kernel.build()?;
        let skeleton = match &self.skeleton {
            Some(s) => s.build()?,
            None => kernel.natural_skeleton(),
        };
        Model::new(
            kernel,
            skeleton,
            Caps {
                max_steps: self.engine.max_steps,
                max_blocks: self.engine.max_blocks,
            },
        )
    }

    pub fn window(&self) -> Result<(i64, i64)> {
        parse_range(&self.run.window)
    }

    /// Seeds as a half-open range.
    pub fn seed_range(&self) -> Result<std::ops::Range<u64>> {
        if let Some(s) = &self.run.seeds {
            let (a, b) = parse_range(s)?;
            return Ok(a as u64..b as u64 + 1);
        }
        let r = self.run.replicas.unwrap_or(1);
        Ok(self.run.seed..self.run.seed + r)
    }
}
