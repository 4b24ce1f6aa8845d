//! Denoisers for the prior sub-problem, keyed by the noise level `beta`.
//!
//! All spatial operators are per frame and per channel with periodic borders.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::tensor::VideoTensor;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DenoiserSpec {
    Identity,
    /// Gaussian smoothing with standard deviation `multiplier * beta` pixels.
    Gaussian {
        multiplier: f64,
    },
    /// Anisotropic TV with weight `multiplier * beta^2`, solved by projected
    /// dual ascent for `iterations` steps of size `step`.
    Tv {
        multiplier: f64,
        iterations: usize,
        step: f64,
    },
}

impl DenoiserSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Identity => Ok(()),
            Self::Gaussian { multiplier } => {
                if !(multiplier >= 0.0) || !multiplier.is_finite() {
                    return Err(invalid("gaussian multiplier must be finite and non-negative"));
                }
                Ok(())
            }
            Self::Tv { multiplier, iterations, step } => {
                if !(multiplier >= 0.0) || !multiplier.is_finite() {
                    return Err(invalid("tv multiplier must be finite and non-negative"));
                }
                if iterations == 0 {
                    return Err(invalid("tv needs at least one iteration"));
                }
                if !(step > 0.0) || !step.is_finite() {
                    return Err(invalid("tv step must be positive"));
                }
                Ok(())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Gaussian { .. } => "gaussian",
            Self::Tv { .. } => "tv",
        }
    }
}

/// Applies the configured denoiser at noise level `beta`.
pub fn denoise(z: &VideoTensor, beta: f64, spec: &DenoiserSpec) -> Result<VideoTensor> {
    spec.validate()?;
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(invalid("beta must be finite and non-negative"));
    }
    let out = match *spec {
        DenoiserSpec::Identity => return Ok(z.clone()),
        DenoiserSpec::Gaussian { multiplier } => {
            let sigma = multiplier * beta;
            if sigma == 0.0 {
                return Ok(z.clone());
            }
            gaussian_smooth(z, sigma)?
        }
        DenoiserSpec::Tv { multiplier, iterations, step } => {
            let weight = multiplier * beta * beta;
            if weight == 0.0 {
                return Ok(z.clone());
            }
            tv_denoise(z, weight, iterations, step)?
        }
    };
    if !out.is_finite() {
        return Err(crate::error::Error::NonFinite("denoiser"));
    }
    Ok(out)
}

fn gaussian_taps(sigma: f64) -> Vec<f64> {
    let radius = libm::ceil(3.0 * sigma).max(1.0) as isize;
    let taps: Vec<f64> = (-radius..=radius).map(|d| libm::exp(-((d * d) as f64) / (2.0 * sigma * sigma))).collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|v| v / sum).collect()
}

/// Separable per-frame Gaussian blur with periodic borders.
pub fn gaussian_smooth(z: &VideoTensor, sigma: f64) -> Result<VideoTensor> {
    let taps = gaussian_taps(sigma);
    let radius = (taps.len() / 2) as isize;
    let [et, eh, ew] = z.extent();
    let c = z.channels();
    let src = z.as_slice();
    let mut tmp = vec![0.0; src.len()];
    let mut out = vec![0.0; src.len()];
    let idx = |t: usize, h: usize, w: usize, ch: usize| ((t * eh + h) * ew + w) * c + ch;
    for t in 0..et {
        for h in 0..eh {
            for w in 0..ew {
                for ch in 0..c {
                    let mut acc = 0.0;
                    for (k, tap) in taps.iter().enumerate() {
                        let ww = (w as isize + k as isize - radius).rem_euclid(ew as isize) as usize;
                        acc += tap * src[idx(t, h, ww, ch)];
                    }
                    tmp[idx(t, h, w, ch)] = acc;
                }
            }
        }
        for h in 0..eh {
            for w in 0..ew {
                for ch in 0..c {
                    let mut acc = 0.0;
                    for (k, tap) in taps.iter().enumerate() {
                        let hh = (h as isize + k as isize - radius).rem_euclid(eh as isize) as usize;
                        acc += tap * tmp[idx(t, hh, w, ch)];
                    }
                    out[idx(t, h, w, ch)] = acc;
                }
            }
        }
    }
    VideoTensor::from_vec(z.extent(), c, out)
}

/// One `h x w` image plane with periodic forward differences.
struct Plane2 {
    h: usize,
    w: usize,
}

impl Plane2 {
    fn gradient(&self, x: &[f64], gx: &mut [f64], gy: &mut [f64]) {
        for i in 0..self.h {
            let down = ((i + 1) % self.h) * self.w;
            for j in 0..self.w {
                let k = i * self.w + j;
                gx[k] = x[i * self.w + (j + 1) % self.w] - x[k];
                gy[k] = x[down + j] - x[k];
            }
        }
    }

    /// Adjoint of `gradient`.
    fn gradient_adjoint(&self, px: &[f64], py: &[f64], out: &mut [f64]) {
        for i in 0..self.h {
            let up = ((i + self.h - 1) % self.h) * self.w;
            for j in 0..self.w {
                let k = i * self.w + j;
                let left = i * self.w + (j + self.w - 1) % self.w;
                out[k] = px[left] - px[k] + py[up + j] - py[k];
            }
        }
    }

    fn total_variation(&self, x: &[f64]) -> f64 {
        let mut tv = 0.0;
        for i in 0..self.h {
            let down = ((i + 1) % self.h) * self.w;
            for j in 0..self.w {
                let k = i * self.w + j;
                tv += (x[i * self.w + (j + 1) % self.w] - x[k]).abs() + (x[down + j] - x[k]).abs();
            }
        }
        tv
    }
}

/// Dual iterate for one plane: primal recovered as `z - weight * grad^T p`.
struct TvState<'a> {
    geom: Plane2,
    z: &'a [f64],
    weight: f64,
    px: Vec<f64>,
    py: Vec<f64>,
    gx: Vec<f64>,
    gy: Vec<f64>,
    x: Vec<f64>,
}

impl<'a> TvState<'a> {
    fn new(z: &'a [f64], h: usize, w: usize, weight: f64) -> Self {
        let n = h * w;
        Self {
            geom: Plane2 { h, w },
            z,
            weight,
            px: vec![0.0; n],
            py: vec![0.0; n],
            gx: vec![0.0; n],
            gy: vec![0.0; n],
            x: z.to_vec(),
        }
    }

    fn step(&mut self, step: f64) {
        self.geom.gradient(&self.x, &mut self.gx, &mut self.gy);
        let gain = step / self.weight;
        for (p, g) in self.px.iter_mut().zip(&self.gx) {
            *p = (*p + gain * g).clamp(-1.0, 1.0);
        }
        for (p, g) in self.py.iter_mut().zip(&self.gy) {
            *p = (*p + gain * g).clamp(-1.0, 1.0);
        }
        self.geom.gradient_adjoint(&self.px, &self.py, &mut self.x);
        for (x, z) in self.x.iter_mut().zip(self.z) {
            *x = z - self.weight * *x;
        }
    }
}

fn frame_planes(v: &VideoTensor) -> Vec<Vec<f64>> {
    let [et, eh, ew] = v.extent();
    let c = v.channels();
    let mut planes = Vec::with_capacity(et * c);
    for t in 0..et {
        let frame = v.frame(t);
        for ch in 0..c {
            planes.push((0..eh * ew).map(|i| frame[i * c + ch]).collect());
        }
    }
    planes
}

fn from_frame_planes(like: &VideoTensor, planes: &[Vec<f64>]) -> Result<VideoTensor> {
    let [et, eh, ew] = like.extent();
    let c = like.channels();
    let mut data = vec![0.0; like.len()];
    for t in 0..et {
        for ch in 0..c {
            let plane = &planes[t * c + ch];
            for i in 0..eh * ew {
                data[(t * eh * ew + i) * c + ch] = plane[i];
            }
        }
    }
    VideoTensor::from_vec(like.extent(), c, data)
}

/// Per-frame anisotropic TV denoising. The second value holds the surrogate
/// objective after each iteration.
pub fn tv_denoise_traced(
    z: &VideoTensor,
    weight: f64,
    iterations: usize,
    step: f64,
) -> Result<(VideoTensor, Vec<f64>)> {
    if !(weight > 0.0) {
        return Err(invalid("tv weight must be positive"));
    }
    let [_, eh, ew] = z.extent();
    let inputs = frame_planes(z);
    let mut states: Vec<TvState<'_>> = inputs.iter().map(|p| TvState::new(p, eh, ew, weight)).collect();
    let mut trace = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let mut objective = 0.0;
        for s in states.iter_mut() {
            s.step(step);
            let fidelity: f64 = s.x.iter().zip(s.z).map(|(a, b)| (a - b) * (a - b)).sum();
            objective += 0.5 * fidelity + weight * s.geom.total_variation(&s.x);
        }
        trace.push(objective);
    }
    let planes: Vec<Vec<f64>> = states.into_iter().map(|s| s.x).collect();
    Ok((from_frame_planes(z, &planes)?, trace))
}

pub fn tv_denoise(z: &VideoTensor, weight: f64, iterations: usize, step: f64) -> Result<VideoTensor> {
    tv_denoise_traced(z, weight, iterations, step).map(|(x, _)| x)
}

/// `0.5 ||z - x||^2 + weight * TV(x)` with per-frame anisotropic TV.
pub fn tv_objective(x: &VideoTensor, z: &VideoTensor, weight: f64) -> Result<f64> {
    x.check_same_dims(z)?;
    let [_, eh, ew] = x.extent();
    let geom = Plane2 { h: eh, w: ew };
    let tv: f64 = frame_planes(x).iter().map(|p| geom.total_variation(p)).sum();
    Ok(0.5 * x.axpby(1.0, z, -1.0)?.norm_sq() + weight * tv)
}
