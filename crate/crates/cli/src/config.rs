//! Scenario files: JSON with flag overrides on top.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use gdecouple::verify::TestFunctionSpec;
use serde::{Deserialize, Serialize};

use crate::model::ModelSpec;

/// Smallest sample count accepted by Monte Carlo steps.
pub const MIN_MC_SAMPLES: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PPolicy {
    /// `p = 2 p(X)` for each section.
    #[serde(rename = "auto2pX")]
    Auto2pX,
    #[serde(rename = "fixed")]
    Fixed(f64),
}

impl PPolicy {
    pub fn resolve(&self, p_x: f64) -> f64 {
        match self {
            PPolicy::Auto2pX => 2.0 * p_x,
            PPolicy::Fixed(p) => *p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_n_list() -> Vec<usize> {
    vec![10]
}

fn default_functions() -> Vec<TestFunctionSpec> {
    vec![TestFunctionSpec::Indicator { eps: 1.0 }]
}

fn default_samples() -> usize {
    100_000
}

fn default_grid() -> usize {
    gdecouple::szego::DEFAULT_GRID
}

fn default_eps() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelSpec,
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    #[serde(default = "PPolicy::default_policy")]
    pub p_policy: PPolicy,
    #[serde(default = "default_functions")]
    pub functions: Vec<TestFunctionSpec>,
    #[serde(default = "default_samples")]
    pub mc_samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Half-width of the probability box in the Khatri–Sidák checks.
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Symbol grid size `2K` for the Szegő command.
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

impl PPolicy {
    fn default_policy() -> Self {
        PPolicy::Auto2pX
    }
}

impl ScenarioConfig {
    pub fn new(model: ModelSpec) -> Self {
        Self {
            model,
            n_list: default_n_list(),
            p_policy: PPolicy::Auto2pX,
            functions: default_functions(),
            mc_samples: default_samples(),
            seed: 0,
            eps: default_eps(),
            grid: default_grid(),
            output: None,
        }
    }

    pub fn from_json(text: &str, origin: &str) -> anyhow::Result<Self> {
        serde_json::from_str(text).with_context(|| format!("invalid scenario config {origin}"))
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Checks the structural invariants; `monte_carlo` adds the sample floor.
    pub fn validate(&self, monte_carlo: bool) -> anyhow::Result<()> {
        if self.n_list.is_empty() {
            bail!("n_list must not be empty");
        }
        if self.n_list[0] == 0 {
            bail!("n_list entries must be positive");
        }
        if let Some(w) = self.n_list.windows(2).find(|w| w[0] >= w[1]) {
            bail!("n_list must be strictly ascending ({} then {})", w[0], w[1]);
        }
        if let PPolicy::Fixed(p) = self.p_policy {
            if !(p >= 1.0 && p.is_finite()) {
                bail!("fixed p must be a finite number >= 1, found {p}");
            }
        }
        if !(self.eps > 0.0) {
            bail!("eps must be positive");
        }
        for (i, f) in self.functions.iter().enumerate() {
            f.validate().with_context(|| format!("functions[{i}]"))?;
        }
        if monte_carlo {
            if self.functions.is_empty() {
                bail!("functions must not be empty for verify");
            }
            if self.mc_samples < MIN_MC_SAMPLES {
                bail!("mc_samples must be at least {MIN_MC_SAMPLES}, found {}", self.mc_samples);
            }
        }
        Ok(())
    }

    pub fn format(&self) -> Format {
        self.output.as_ref().map(|o| o.format).unwrap_or_default()
    }

    pub fn output_path(&self) -> Option<&Path> {
        self.output.as_ref().and_then(|o| o.path.as_deref())
    }
}
