//! Half-quadratic splitting: alternate the closed-form data solve with a
//! denoiser for a fixed number of iterations.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::fdt::{fdt_solve, FdtContext};
use crate::interp::{init_x0, InitMode};
use crate::kernel::Kernel3D;
use crate::priors::{denoise, DenoiserSpec};
use crate::tensor::{ScaleFactor, VideoTensor};

/// Lower bound on the noise level used for the data weight, so that
/// `alpha_k = mu_k * sigma^2` stays positive on noiseless input.
pub const SIGMA_FLOOR: f64 = 1e-3;

/// TV strength multiplier used by [`HqsConfig::default`], tuned on the
/// synthetic moving-pattern benchmark.
pub const DEFAULT_TV_MULTIPLIER: f64 = 0.002;

#[derive(Clone, Debug, PartialEq)]
pub struct HqsConfig {
    pub iterations: usize,
    /// Assumed noise standard deviation of the input.
    pub sigma: f64,
    /// Prior weight.
    pub lambda: f64,
    pub mu_first: f64,
    pub mu_last: f64,
    pub denoiser: DenoiserSpec,
    pub init: InitMode,
}

impl Default for HqsConfig {
    fn default() -> Self {
        Self {
            iterations: 3,
            sigma: 0.01,
            lambda: 0.02,
            mu_first: 1e-2,
            mu_last: 1.0,
            denoiser: DenoiserSpec::Tv { multiplier: DEFAULT_TV_MULTIPLIER, iterations: 50, step: 0.125 },
            init: InitMode::Trilinear,
        }
    }
}

impl HqsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(invalid("at least one iteration is required"));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(invalid("sigma must be finite and non-negative"));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(invalid("lambda must be positive"));
        }
        if !(self.mu_first > 0.0) || !(self.mu_first <= self.mu_last) || !self.mu_last.is_finite() {
            return Err(invalid("need 0 < mu_first <= mu_last"));
        }
        self.denoiser.validate()
    }
}

/// Per-iteration weights: `alpha_k` for the data solve, `beta_k` for the denoiser.
#[derive(Clone, Debug, PartialEq)]
pub struct HqsSchedule {
    pub mus: Vec<f64>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl HqsSchedule {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

/// Log-spaced `mu_k` between the configured endpoints (`mu_last` alone when
/// there is a single iteration).
pub fn build_schedule(cfg: &HqsConfig) -> Result<HqsSchedule> {
    cfg.validate()?;
    let k = cfg.iterations;
    let mus: Vec<f64> = if k == 1 {
        alloc::vec![cfg.mu_last]
    } else {
        let ratio = libm::log(cfg.mu_last / cfg.mu_first);
        (0..k)
            .map(|i| if i + 1 == k { cfg.mu_last } else { cfg.mu_first * libm::exp(ratio * i as f64 / (k - 1) as f64) })
            .collect()
    };
    let sigma = cfg.sigma.max(SIGMA_FLOOR);
    let alphas = mus.iter().map(|mu| mu * sigma * sigma).collect();
    let betas = mus.iter().map(|mu| libm::sqrt(cfg.lambda / mu)).collect();
    Ok(HqsSchedule { mus, alphas, betas })
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    /// Output of the data solve.
    pub z: VideoTensor,
    /// Output of the denoiser.
    pub x: VideoTensor,
}

#[derive(Clone, Debug)]
pub struct RestoreTrace {
    pub schedule: HqsSchedule,
    pub steps: Vec<TraceStep>,
}

/// Restores a high-resolution video from `y`, the degraded observation under
/// `kernel` and `scale`.
pub fn restore(
    y: &VideoTensor,
    kernel: &Kernel3D,
    scale: ScaleFactor,
    cfg: &HqsConfig,
) -> Result<(VideoTensor, RestoreTrace)> {
    let schedule = build_schedule(cfg)?;
    let mut ctx = FdtContext::new(kernel, scale, y.extent(), schedule.alphas[0])?;
    let mut x = init_x0(y, scale, cfg.init);
    let mut steps = Vec::with_capacity(cfg.iterations);
    for (k, (&alpha, &beta)) in schedule.alphas.iter().zip(&schedule.betas).enumerate() {
        let iteration = k + 1;
        ctx = ctx.with_alpha(alpha)?;
        let z = fdt_solve(&x, y, &ctx).map_err(|e| diverged(e, iteration))?;
        x = denoise(&z, beta, &cfg.denoiser).map_err(|e| diverged(e, iteration))?;
        if !x.is_finite() {
            return Err(Error::Diverged { iteration });
        }
        steps.push(TraceStep { z, x: x.clone() });
    }
    Ok((x, RestoreTrace { schedule, steps }))
}

fn diverged(e: Error, iteration: usize) -> Error {
    match e {
        Error::NonFinite(_) | Error::ImaginaryResidue(_) => Error::Diverged { iteration },
        other => other,
    }
}
