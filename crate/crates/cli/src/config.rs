use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use friendly_core::ifs::{read_system, systems};
use friendly_core::{IteratedFunctionSystem, PsiFunction};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Experiment settings, read from TOML. Only `ifs_path` is mandatory in a
/// file; running without `--config` uses [`ExperimentConfig::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `builtin:<name>` or a system file, relative to the config file.
    pub ifs_path: String,
    #[serde(default = "default_psi")]
    pub psi_spec: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_blocks")]
    pub blocks: [u32; 2],
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Absolute tolerance of the mass intervals printed by `sample`.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_taus")]
    pub taus: Vec<f64>,
    /// Hausdorff exponent for `cover-cost` and the theorem-2 sum; defaults to delta.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Decay exponent; defaults to `delta - (d - 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Largest certificate radius; defaults to a tenth of the open set diameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    /// Balls per `(d, n)` cell in `lemma-audit`.
    #[serde(default = "default_balls")]
    pub balls: usize,
    /// Ambient dimensions for `lemma-audit`.
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,

    #[serde(skip)]
    base: Option<PathBuf>,
}

fn default_psi() -> String {
    "power:tau=2.5".into()
}
fn default_trials() -> usize {
    200
}
fn default_blocks() -> [u32; 2] {
    [1, 10]
}
fn default_output_dir() -> PathBuf {
    "out".into()
}
fn default_tolerance() -> f64 {
    1e-4
}
fn default_samples() -> usize {
    100_000
}
fn default_taus() -> Vec<f64> {
    vec![2.0, 3.0, 4.0]
}
fn default_balls() -> usize {
    200
}
fn default_dims() -> Vec<usize> {
    vec![1, 2]
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            ifs_path: "builtin:cantor".into(),
            psi_spec: default_psi(),
            seed: 0,
            trials: default_trials(),
            blocks: default_blocks(),
            output_dir: default_output_dir(),
            tolerance: default_tolerance(),
            samples: default_samples(),
            taus: default_taus(),
            s: None,
            alpha: None,
            r0: None,
            balls: default_balls(),
            dims: default_dims(),
            base: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg: ExperimentConfig = toml::from_str(text).context("invalid config")?;
        cfg.base = base.map(Path::to_path_buf);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_toml(&text, path.parent())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.samples == 0 {
            bail!("samples must be at least 1");
        }
        if self.balls == 0 {
            bail!("balls must be at least 1");
        }
        if self.blocks[0] > self.blocks[1] {
            bail!("blocks range {}..={} is empty", self.blocks[0], self.blocks[1]);
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            bail!("tolerance must lie in (0, 1), got {}", self.tolerance);
        }
        if self.dims.is_empty() {
            bail!("dims must not be empty");
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the resolved config, with
    /// `output_dir` blanked so that moving the output does not change it.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let text = toml::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))[..16].to_string()
    }

    pub fn system(&self) -> Result<IteratedFunctionSystem> {
        if let Some(name) = self.ifs_path.strip_prefix("builtin:") {
            return systems::by_name(name).with_context(|| {
                format!("unknown builtin system '{name}', expected one of {:?}", systems::NAMES)
            });
        }
        let path = self.resolve(Path::new(&self.ifs_path));
        read_system(&path).with_context(|| format!("ifs_path: cannot load {}", path.display()))
    }

    pub fn psi(&self, d: usize) -> Result<PsiFunction> {
        PsiFunction::parse(&self.psi_spec, d, self.base.as_deref()).context("psi_spec")
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p.to_path_buf(),
        }
    }
}
