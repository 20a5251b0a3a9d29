//! Run configuration with layered resolution.
//!
//! Every CLI subcommand accepts `--config run.json`. A setting is resolved,
//! highest precedence first:
//!
//! 1. an explicit command-line flag,
//! 2. the config file,
//! 3. the `MDMA_SEED` environment variable (seed only),
//! 4. the built-in default.

use serde::{Deserialize, Serialize};

use crate::attention::MaskMode;
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 2;
pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_GRID: usize = 16;
pub const DEFAULT_FRAMES: usize = 8;
pub const DEFAULT_STEPS: usize = 10;
pub const DEFAULT_OBJECTS: usize = 2;
pub const DEFAULT_CHANNELS: usize = 8;
pub const DEFAULT_CONVERGENCE_STEP: usize = 3;
pub const DEFAULT_NOISE_SIGMA: f32 = 4.0;
pub const DEFAULT_HEADS: usize = 4;
pub const DEFAULT_HEAD_DIM: usize = 8;
pub const DEFAULT_JOBS: usize = 1;

/// A fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub window: usize,
    pub alpha: f64,
    pub mode: MaskMode,
    pub grid_h: usize,
    pub grid_w: usize,
    pub frames: usize,
    pub steps: usize,
    pub objects: usize,
    pub channels: usize,
    pub convergence_step: usize,
    pub noise_sigma: f32,
    pub heads: usize,
    pub head_dim: usize,
    pub jobs: usize,
    pub literal_identity_v2v: bool,
    pub literal_t2v: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            window: DEFAULT_WINDOW,
            alpha: DEFAULT_ALPHA,
            mode: MaskMode::NegInf,
            grid_h: DEFAULT_GRID,
            grid_w: DEFAULT_GRID,
            frames: DEFAULT_FRAMES,
            steps: DEFAULT_STEPS,
            objects: DEFAULT_OBJECTS,
            channels: DEFAULT_CHANNELS,
            convergence_step: DEFAULT_CONVERGENCE_STEP,
            noise_sigma: DEFAULT_NOISE_SIGMA,
            heads: DEFAULT_HEADS,
            head_dim: DEFAULT_HEAD_DIM,
            jobs: DEFAULT_JOBS,
            literal_identity_v2v: false,
            literal_t2v: false,
        }
    }
}

/// The shape of a config file or of collected command-line overrides: every
/// field optional, absent means "not set at this layer".
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub seed: Option<u64>,
    pub window: Option<usize>,
    pub alpha: Option<f64>,
    pub mode: Option<MaskMode>,
    pub grid_h: Option<usize>,
    pub grid_w: Option<usize>,
    pub frames: Option<usize>,
    pub steps: Option<usize>,
    pub objects: Option<usize>,
    pub channels: Option<usize>,
    pub convergence_step: Option<usize>,
    pub noise_sigma: Option<f32>,
    pub heads: Option<usize>,
    pub head_dim: Option<usize>,
    pub jobs: Option<usize>,
    pub literal_identity_v2v: Option<bool>,
    pub literal_t2v: Option<bool>,
}

impl PartialConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Merges the layers (flags over file over `MDMA_SEED` over defaults) and
/// validates the result.
pub fn resolve(
    flags: &PartialConfig,
    file: Option<&PartialConfig>,
    env_seed: Option<u64>,
) -> Result<RunConfig> {
    let d = RunConfig::default();
    macro_rules! layered {
        ($field:ident, $default:expr) => {
            flags
                .$field
                .or(file.and_then(|f| f.$field))
                .unwrap_or($default)
        };
    }

    let config = RunConfig {
        seed: flags
            .seed
            .or(file.and_then(|f| f.seed))
            .or(env_seed)
            .unwrap_or(d.seed),
        window: layered!(window, d.window),
        alpha: layered!(alpha, d.alpha),
        mode: layered!(mode, d.mode),
        grid_h: layered!(grid_h, d.grid_h),
        grid_w: layered!(grid_w, d.grid_w),
        frames: layered!(frames, d.frames),
        steps: layered!(steps, d.steps),
        objects: layered!(objects, d.objects),
        channels: layered!(channels, d.channels),
        convergence_step: layered!(convergence_step, d.convergence_step),
        noise_sigma: layered!(noise_sigma, d.noise_sigma),
        heads: layered!(heads, d.heads),
        head_dim: layered!(head_dim, d.head_dim),
        jobs: layered!(jobs, d.jobs),
        literal_identity_v2v: layered!(literal_identity_v2v, d.literal_identity_v2v),
        literal_t2v: layered!(literal_t2v, d.literal_t2v),
    };
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be in [0, 1], got {}",
                self.alpha
            )));
        }
        for (what, got) in [
            ("window", self.window),
            ("grid_h", self.grid_h),
            ("grid_w", self.grid_w),
            ("frames", self.frames),
            ("steps", self.steps),
            ("objects", self.objects),
            ("channels", self.channels),
            ("convergence_step", self.convergence_step),
            ("heads", self.heads),
            ("head_dim", self.head_dim),
            ("jobs", self.jobs),
        ] {
            if got < 1 {
                return Err(Error::InvalidCount { what, min: 1, got });
            }
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "noise_sigma must be finite and >= 0, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// Reads `MDMA_SEED` from an environment snapshot; a present-but-invalid
/// value is an error rather than a silent default.
pub fn seed_from_env(value: Option<&str>) -> Result<Option<u64>> {
    match value {
        None => Ok(None),
        Some(raw) => raw
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Error::InvalidConfig(format!("MDMA_SEED must be an unsigned integer, got {raw:?}"))),
    }
}
