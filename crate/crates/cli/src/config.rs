//! Experiment configuration file (TOML).
//!
//! ```toml
//! [degradation]
//! kernel = "blur.k3"      # relative to this file
//! scale = [2, 2, 2]
//! noise_sigma = 0.005
//! seed = 7
//!
//! [hqs]
//! iterations = 3
//! sigma = 0.01
//! lambda = 0.02
//! mu_first = 0.01
//! mu_last = 1.0
//! init = "trilinear"
//!
//! [denoiser]
//! kind = "tv"
//! multiplier = 0.002
//! iterations = 50
//! step = 0.125
//!
//! [metrics]
//! color_space = "rgb"
//!
//! [output]
//! dump_trace = false
//! ```
//!
//! Every section and key is optional. Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use stvsr_core::hqs::DEFAULT_TV_MULTIPLIER;
use stvsr_core::{ColorSpace, DenoiserSpec, HqsConfig, InitMode, ScaleFactor};

use crate::error::{io_err, CliError, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub degradation: DegradationSection,
    pub hqs: HqsSection,
    pub denoiser: DenoiserSection,
    pub metrics: MetricsSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DegradationSection {
    pub kernel: Option<PathBuf>,
    pub scale: [usize; 3],
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for DegradationSection {
    fn default() -> Self {
        Self { kernel: None, scale: [1, 1, 1], noise_sigma: 0.0, seed: 0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HqsSection {
    pub iterations: usize,
    pub sigma: f64,
    pub lambda: f64,
    pub mu_first: f64,
    pub mu_last: f64,
    pub init: InitName,
}

impl Default for HqsSection {
    fn default() -> Self {
        let d = HqsConfig::default();
        Self {
            iterations: d.iterations,
            sigma: d.sigma,
            lambda: d.lambda,
            mu_first: d.mu_first,
            mu_last: d.mu_last,
            init: InitName::Trilinear,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitName {
    Trilinear,
    Nearest,
    ZeroFill,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenoiserKind {
    Identity,
    Gaussian,
    Tv,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DenoiserSection {
    pub kind: DenoiserKind,
    pub multiplier: Option<f64>,
    pub iterations: usize,
    pub step: f64,
}

impl Default for DenoiserSection {
    fn default() -> Self {
        Self { kind: DenoiserKind::Tv, multiplier: None, iterations: 50, step: 0.125 }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorName {
    #[default]
    Rgb,
    Luma,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    pub color_space: ColorName,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dump_trace: bool,
}

impl ExperimentConfig {
    /// Parses and validates; relative kernel paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path, origin: &Path) -> Result<Self> {
        let bad = |message: String| CliError::Config { path: origin.to_path_buf(), message };
        let mut cfg: Self = toml::from_str(text).map_err(|e| bad(e.message().to_string()))?;
        if let Some(k) = cfg.degradation.kernel.take() {
            cfg.degradation.kernel = Some(base.join(k));
        }
        cfg.scale().map_err(|e| bad(e.to_string()))?;
        let sigma = cfg.degradation.noise_sigma;
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(bad("degradation.noise_sigma must be finite and non-negative".into()));
        }
        cfg.hqs_config().validate().map_err(|e| bad(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")), path)
    }

    pub fn scale(&self) -> Result<ScaleFactor> {
        let [t, h, w] = self.degradation.scale;
        Ok(ScaleFactor::new(t, h, w)?)
    }

    pub fn denoiser(&self) -> DenoiserSpec {
        let d = &self.denoiser;
        match d.kind {
            DenoiserKind::Identity => DenoiserSpec::Identity,
            DenoiserKind::Gaussian => DenoiserSpec::Gaussian { multiplier: d.multiplier.unwrap_or(1.0) },
            DenoiserKind::Tv => DenoiserSpec::Tv {
                multiplier: d.multiplier.unwrap_or(DEFAULT_TV_MULTIPLIER),
                iterations: d.iterations,
                step: d.step,
            },
        }
    }

    pub fn hqs_config(&self) -> HqsConfig {
        let h = &self.hqs;
        HqsConfig {
            iterations: h.iterations,
            sigma: h.sigma,
            lambda: h.lambda,
            mu_first: h.mu_first,
            mu_last: h.mu_last,
            denoiser: self.denoiser(),
            init: match h.init {
                InitName::Trilinear => InitMode::Trilinear,
                InitName::Nearest => InitMode::Nearest,
                InitName::ZeroFill => InitMode::ZeroFill,
            },
        }
    }

    pub fn color_space(&self) -> ColorSpace {
        match self.metrics.color_space {
            ColorName::Rgb => ColorSpace::Rgb,
            ColorName::Luma => ColorSpace::Luma,
        }
    }
}
