//! Closed-form data solve.
//!
//! Minimizes `||Y - (Z conv K) dec s||^2 + alpha ||Z - X_prev||^2` exactly
//! under the circular boundary model. With `D = conj(F(K)) F(Y up s) +
//! alpha F(X_prev)` and `H = F(K)`:
//!
//! ```text
//! Z = F^-1( (D - conj(H) * tile( fold(H D) / (fold(|H|^2) + alpha) )) / alpha )
//! ```
//!
//! `fold` averages the `s_t * s_h * s_w` aliased blocks of a spectrum and
//! `tile` repeats a low-resolution spectrum back to full size. Because `fold`
//! averages rather than sums, the regularizer enters the denominator with unit
//! weight (a summing fold would carry the factor `s_t * s_h * s_w` instead).
//! The dense normal-equation solver in [`crate::oracle`] pins this down.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::degradation::{conv3_circular, downsample_std};
use crate::error::{invalid, Error, Result};
use crate::kernel::Kernel3D;
use crate::spectrum::{fft3_plane, ifft3_plane, kernel_to_otf, ComplexSpectrum};
use crate::tensor::{Extent, ScaleFactor, VideoTensor};

/// Zero-filling upsampler, the adjoint of phase-0 decimation.
pub fn upsample_zero(y: &VideoTensor, scale: ScaleFactor) -> VideoTensor {
    let hi = scale.upscale(y.extent());
    let mut data = alloc::vec![0.0; hi[0] * hi[1] * hi[2] * y.channels()];
    let c = y.channels();
    let [st, sh, sw] = scale.as_array();
    for t in 0..y.frames() {
        for h in 0..y.height() {
            for w in 0..y.width() {
                let dst = (((t * st) * hi[1] + h * sh) * hi[2] + w * sw) * c;
                let src = y.index(t, h, w, 0);
                data[dst..dst + c].copy_from_slice(&y.as_slice()[src..src + c]);
            }
        }
    }
    VideoTensor::from_vec(hi, c, data).expect("upsampled shape is valid")
}

/// Mean of the `s_t x s_h x s_w` contiguous blocks of a full-size spectrum.
pub fn spectrum_fold_avg(spectrum: &ComplexSpectrum, scale: ScaleFactor) -> Result<ComplexSpectrum> {
    let hi = spectrum.extent();
    let lo = scale.downscale(hi)?;
    let mut out = ComplexSpectrum::zeros(lo);
    let weight = 1.0 / scale.product() as f64;
    let src = spectrum.as_slice();
    let dst = out.as_mut_slice();
    for t in 0..hi[0] {
        let lt = t % lo[0];
        for h in 0..hi[1] {
            let lh = h % lo[1];
            let row = (t * hi[1] + h) * hi[2];
            let lrow = (lt * lo[1] + lh) * lo[2];
            for w in 0..hi[2] {
                dst[lrow + w % lo[2]] += src[row + w];
            }
        }
    }
    for v in dst.iter_mut() {
        *v *= weight;
    }
    Ok(out)
}

/// Repeats a low-resolution spectrum `s_t x s_h x s_w` times.
pub fn spectrum_tile(spectrum: &ComplexSpectrum, scale: ScaleFactor) -> ComplexSpectrum {
    let lo = spectrum.extent();
    let hi = scale.upscale(lo);
    let mut out = ComplexSpectrum::zeros(hi);
    let src = spectrum.as_slice();
    let dst = out.as_mut_slice();
    for t in 0..hi[0] {
        for h in 0..hi[1] {
            let row = (t * hi[1] + h) * hi[2];
            let lrow = ((t % lo[0]) * lo[1] + h % lo[1]) * lo[2];
            for w in 0..hi[2] {
                dst[row + w] = src[lrow + w % lo[2]];
            }
        }
    }
    out
}

/// Kernel-dependent quantities reused across solves at one video size.
#[derive(Clone, Debug)]
pub struct FdtContext {
    otf: Arc<ComplexSpectrum>,
    // fold(|H|^2), real and non-negative
    folded_power: Arc<Vec<f64>>,
    scale: ScaleFactor,
    alpha: f64,
    hstr_extent: Extent,
    lstr_extent: Extent,
}

impl FdtContext {
    pub fn new(kernel: &Kernel3D, scale: ScaleFactor, lstr_extent: Extent, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let hstr_extent = scale.upscale(lstr_extent);
        let otf = kernel_to_otf(kernel, hstr_extent)?;
        let power = otf.map(|v| Complex64::new(v.norm_sqr(), 0.0));
        let folded_power = spectrum_fold_avg(&power, scale)?.as_slice().iter().map(|v| v.re).collect();
        Ok(Self { otf: Arc::new(otf), folded_power: Arc::new(folded_power), scale, alpha, hstr_extent, lstr_extent })
    }

    /// Same kernel and shapes, different regularization weight.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha, ..self.clone() })
    }

    pub fn otf(&self) -> &ComplexSpectrum {
        &self.otf
    }

    pub fn scale(&self) -> ScaleFactor {
        self.scale
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn hstr_extent(&self) -> Extent {
        self.hstr_extent
    }

    pub fn lstr_extent(&self) -> Extent {
        self.lstr_extent
    }

    fn solve_plane(&self, x_prev: &[f64], y_up: &[f64]) -> Result<Vec<f64>> {
        let alpha = self.alpha;
        let otf = &*self.otf;
        let fy = fft3_plane(y_up, self.hstr_extent)?;
        let fx = fft3_plane(x_prev, self.hstr_extent)?;
        let d = ComplexSpectrum::from_vec(
            self.hstr_extent,
            otf.as_slice()
                .iter()
                .zip(fy.as_slice())
                .zip(fx.as_slice())
                .map(|((h, y), x)| h.conj() * y + x * alpha)
                .collect(),
        )?;
        let mut ratio = spectrum_fold_avg(&otf.zip_with(&d, |h, v| h * v), self.scale)?;
        for (r, p) in ratio.as_mut_slice().iter_mut().zip(self.folded_power.iter()) {
            *r /= p + alpha;
        }
        let tiled = spectrum_tile(&ratio, self.scale);
        let mut z = d;
        for ((zv, h), q) in z.as_mut_slice().iter_mut().zip(otf.as_slice()).zip(tiled.as_slice()) {
            *zv = (*zv - h.conj() * q) / alpha;
        }
        ifft3_plane(&z)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid("alpha must be positive and finite"));
    }
    Ok(())
}

/// Exact minimizer of the quadratic data sub-problem, channel by channel.
pub fn fdt_solve(x_prev: &VideoTensor, y: &VideoTensor, ctx: &FdtContext) -> Result<VideoTensor> {
    if x_prev.extent() != ctx.hstr_extent {
        let found = x_prev.dims();
        let e = ctx.hstr_extent;
        return Err(Error::ShapeMismatch { expected: [e[0], e[1], e[2], found[3]], found });
    }
    if y.extent() != ctx.lstr_extent || y.channels() != x_prev.channels() {
        let e = ctx.lstr_extent;
        return Err(Error::ShapeMismatch { expected: [e[0], e[1], e[2], x_prev.channels()], found: y.dims() });
    }
    let y_up = upsample_zero(y, ctx.scale).planes();
    let planes = x_prev.planes().iter().zip(&y_up).map(|(x, yu)| ctx.solve_plane(x, yu)).collect::<Result<Vec<_>>>()?;
    let z = VideoTensor::from_planes(ctx.hstr_extent, &planes)?;
    if !z.is_finite() {
        return Err(Error::NonFinite("data solve"));
    }
    Ok(z)
}

/// `||Y - (Z conv K) dec s||^2 + alpha ||Z - X_prev||^2`.
pub fn data_objective(
    z: &VideoTensor,
    x_prev: &VideoTensor,
    y: &VideoTensor,
    kernel: &Kernel3D,
    scale: ScaleFactor,
    alpha: f64,
) -> Result<f64> {
    Ok(data_residual_sq(z, y, kernel, scale)? + alpha * z.axpby(1.0, x_prev, -1.0)?.norm_sq())
}

/// `||Y - (Z conv K) dec s||^2`.
pub fn data_residual_sq(z: &VideoTensor, y: &VideoTensor, kernel: &Kernel3D, scale: ScaleFactor) -> Result<f64> {
    let predicted = downsample_std(&conv3_circular(z, kernel)?, scale)?;
    Ok(y.axpby(1.0, &predicted, -1.0)?.norm_sq())
}
