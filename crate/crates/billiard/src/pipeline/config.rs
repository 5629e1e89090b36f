//! Plain key=value run configuration with presets and override semantics.

use crate::error::{Error, Result};
use crate::net::{ArchitectureSpec, OptimizerKind, TrainingConfig};
use sha2::{Digest, Sha256};
use std::path::Path;

/// Named bundles of scale defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Desk scale: cutoff 60, states [50, 300), 2 seeds.
    Fast,
    /// Intermediate: cutoff 80, states [50, 500), 3 seeds.
    Ci,
    /// Reproduction scale: cutoff 130, states [50, 1050), 5 seeds.
    Full,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Preset::Fast),
            "ci" => Ok(Preset::Ci),
            "full" => Ok(Preset::Full),
            _ => Err(Error::Config(format!(
                "unknown preset '{s}' (expected fast, ci, or full)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fast => "fast",
            Preset::Ci => "ci",
            Preset::Full => "full",
        }
    }
}

/// Every tunable of the pipeline, resolved from defaults, an optional
/// preset, an optional config file, and explicit overrides (in that order).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub cutoff: u32,
    pub resolution: usize,
    pub state_lo: usize,
    pub state_hi: usize,
    pub split_seed: u64,
    pub init_seed: u64,
    pub shuffle_seed: u64,
    pub seeds: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: String,
    pub conv1_filters: usize,
    pub conv2_filters: usize,
    pub kernel: usize,
    pub dense1_width: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: Preset::Full,
            cutoff: 130,
            resolution: 64,
            state_lo: 50,
            state_hi: 1050,
            split_seed: 7,
            init_seed: 100,
            shuffle_seed: 200,
            seeds: 5,
            epochs: 30,
            batch_size: 32,
            learning_rate: 1e-3,
            optimizer: "adam".into(),
            conv1_filters: 16,
            conv2_filters: 32,
            kernel: 3,
            dense1_width: 128,
        }
    }
}

impl RunConfig {
    pub fn with_preset(preset: Preset) -> Self {
        let mut cfg = Self {
            preset,
            ..Default::default()
        };
        match preset {
            Preset::Fast => {
                cfg.cutoff = 60;
                cfg.state_hi = 300;
                cfg.seeds = 2;
            }
            Preset::Ci => {
                cfg.cutoff = 80;
                cfg.state_hi = 500;
                cfg.seeds = 3;
            }
            Preset::Full => {}
        }
        cfg
    }

    /// Applies one `key=value` assignment; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("invalid value '{value}' for {what}"));
        match key {
            "preset" => {
                *self = RunConfig::with_preset(Preset::parse(value)?);
            }
            "cutoff" => self.cutoff = value.parse().map_err(|_| bad("cutoff"))?,
            "resolution" => self.resolution = value.parse().map_err(|_| bad("resolution"))?,
            "state_lo" => self.state_lo = value.parse().map_err(|_| bad("state_lo"))?,
            "state_hi" => self.state_hi = value.parse().map_err(|_| bad("state_hi"))?,
            "split_seed" => self.split_seed = value.parse().map_err(|_| bad("split_seed"))?,
            "init_seed" => self.init_seed = value.parse().map_err(|_| bad("init_seed"))?,
            "shuffle_seed" => {
                self.shuffle_seed = value.parse().map_err(|_| bad("shuffle_seed"))?
            }
            "seeds" => self.seeds = value.parse().map_err(|_| bad("seeds"))?,
            "epochs" => self.epochs = value.parse().map_err(|_| bad("epochs"))?,
            "batch_size" => self.batch_size = value.parse().map_err(|_| bad("batch_size"))?,
            "learning_rate" => {
                self.learning_rate = value.parse().map_err(|_| bad("learning_rate"))?
            }
            "optimizer" => match value {
                "adam" | "sgd" => self.optimizer = value.into(),
                _ => return Err(bad("optimizer (adam or sgd)")),
            },
            "conv1_filters" => {
                self.conv1_filters = value.parse().map_err(|_| bad("conv1_filters"))?
            }
            "conv2_filters" => {
                self.conv2_filters = value.parse().map_err(|_| bad("conv2_filters"))?
            }
            "kernel" => self.kernel = value.parse().map_err(|_| bad("kernel"))?,
            "dense1_width" => {
                self.dense1_width = value.parse().map_err(|_| bad("dense1_width"))?
            }
            _ => return Err(Error::Config(format!("unknown configuration key '{key}'"))),
        }
        Ok(())
    }

    /// Parses a config file: one `key=value` per line, `#` comments.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected key=value, got '{raw}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// All keys and resolved values, one per line, sorted.
    pub fn resolved_text(&self) -> String {
        let mut lines = vec![
            format!("batch_size={}", self.batch_size),
            format!("conv1_filters={}", self.conv1_filters),
            format!("conv2_filters={}", self.conv2_filters),
            format!("cutoff={}", self.cutoff),
            format!("dense1_width={}", self.dense1_width),
            format!("epochs={}", self.epochs),
            format!("init_seed={}", self.init_seed),
            format!("kernel={}", self.kernel),
            format!("learning_rate={}", self.learning_rate),
            format!("optimizer={}", self.optimizer),
            format!("preset={}", self.preset.name()),
            format!("resolution={}", self.resolution),
            format!("seeds={}", self.seeds),
            format!("shuffle_seed={}", self.shuffle_seed),
            format!("split_seed={}", self.split_seed),
            format!("state_hi={}", self.state_hi),
            format!("state_lo={}", self.state_lo),
        ];
        lines.sort();
        lines.join("\n") + "\n"
    }

    /// Hex digest of the resolved configuration.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.resolved_text().as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn state_range(&self) -> std::ops::Range<usize> {
        self.state_lo..self.state_hi
    }

    pub fn architecture(&self) -> ArchitectureSpec {
        ArchitectureSpec {
            input_resolution: self.resolution,
            conv1_filters: self.conv1_filters,
            conv1_kernel: self.kernel,
            conv2_filters: self.conv2_filters,
            conv2_kernel: self.kernel,
            dense1_width: self.dense1_width,
        }
    }

    /// Training configuration of ensemble member `member` (seeds offset so
    /// members differ).
    pub fn training(&self, member: usize) -> TrainingConfig {
        TrainingConfig {
            optimizer: if self.optimizer == "sgd" {
                OptimizerKind::Sgd
            } else {
                OptimizerKind::default()
            },
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            epochs: self.epochs,
            init_seed: self.init_seed + member as u64,
            shuffle_seed: self.shuffle_seed + member as u64,
        }
    }
}
