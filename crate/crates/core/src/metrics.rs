//! PSNR, SSIM and Charbonnier distance.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::tensor::VideoTensor;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;

/// Which signal the metrics are computed on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ColorSpace {
    /// Every channel, averaged.
    #[default]
    Rgb,
    /// ITU-R BT.601 studio-range luma of RGB input.
    Luma,
}

impl ColorSpace {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Rgb => "rgb",
            Self::Luma => "luma",
        }
    }
}

/// `Y = (16 + 65.481 R + 128.553 G + 24.966 B) / 255` on `[0, 1]` samples;
/// single-channel input is returned unchanged.
pub fn to_luma(v: &VideoTensor) -> Result<VideoTensor> {
    if v.channels() == 1 {
        return Ok(v.clone());
    }
    let data =
        v.as_slice().chunks_exact(3).map(|p| (16.0 + 65.481 * p[0] + 128.553 * p[1] + 24.966 * p[2]) / 255.0).collect();
    VideoTensor::from_vec(v.extent(), 1, data)
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * libm::log10(peak * peak / mse)
    }
}

fn check_peak(peak: f64) -> Result<()> {
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(invalid("peak must be positive"));
    }
    Ok(())
}

/// PSNR in dB over every sample; `+inf` when the inputs are identical.
pub fn psnr(a: &VideoTensor, b: &VideoTensor, peak: f64) -> Result<f64> {
    a.check_same_dims(b)?;
    check_peak(peak)?;
    Ok(psnr_from_mse(mse(a.as_slice(), b.as_slice()), peak))
}

pub fn psnr_per_frame(a: &VideoTensor, b: &VideoTensor, peak: f64) -> Result<Vec<f64>> {
    a.check_same_dims(b)?;
    check_peak(peak)?;
    Ok((0..a.frames()).map(|t| psnr_from_mse(mse(a.frame(t), b.frame(t)), peak)).collect())
}

fn window_taps() -> Vec<f64> {
    let r = (SSIM_WINDOW / 2) as f64;
    let taps: Vec<f64> =
        (0..SSIM_WINDOW).map(|i| libm::exp(-((i as f64 - r).powi(2)) / (2.0 * SSIM_SIGMA * SSIM_SIGMA))).collect();
    let s: f64 = taps.iter().sum();
    taps.into_iter().map(|v| v / s).collect()
}

/// Valid-mode separable filtering of an `h x w` plane.
fn filter_valid(x: &[f64], h: usize, w: usize, taps: &[f64]) -> Vec<f64> {
    let k = taps.len();
    let (oh, ow) = (h - k + 1, w - k + 1);
    let mut rows = vec![0.0; h * ow];
    for i in 0..h {
        for j in 0..ow {
            rows[i * ow + j] = taps.iter().enumerate().map(|(d, t)| t * x[i * w + j + d]).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for i in 0..oh {
        for j in 0..ow {
            out[i * ow + j] = taps.iter().enumerate().map(|(d, t)| t * rows[(i + d) * ow + j]).sum();
        }
    }
    out
}

/// Mean SSIM of one `h x w` plane pair.
pub fn ssim_plane(a: &[f64], b: &[f64], h: usize, w: usize, peak: f64) -> Result<f64> {
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::FrameTooSmall { height: h, width: w, window: SSIM_WINDOW });
    }
    let c1 = (0.01 * peak) * (0.01 * peak);
    let c2 = (0.03 * peak) * (0.03 * peak);
    let taps = window_taps();
    let prod = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> { a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect() };
    let mu_a = filter_valid(a, h, w, &taps);
    let mu_b = filter_valid(b, h, w, &taps);
    let aa = filter_valid(&prod(&|x, _| x * x), h, w, &taps);
    let bb = filter_valid(&prod(&|_, y| y * y), h, w, &taps);
    let ab = filter_valid(&prod(&|x, y| x * y), h, w, &taps);
    let mut total = 0.0;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let var_a = aa[i] - ma * ma;
        let var_b = bb[i] - mb * mb;
        let cov = ab[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
    }
    Ok(total / mu_a.len() as f64)
}

/// SSIM of each frame, averaged over channels.
pub fn ssim_per_frame(a: &VideoTensor, b: &VideoTensor, peak: f64) -> Result<Vec<f64>> {
    a.check_same_dims(b)?;
    check_peak(peak)?;
    let (h, w, c) = (a.height(), a.width(), a.channels());
    let mut out = Vec::with_capacity(a.frames());
    for t in 0..a.frames() {
        let (fa, fb) = (a.frame(t), b.frame(t));
        let mut acc = 0.0;
        for ch in 0..c {
            let pa: Vec<f64> = fa.iter().skip(ch).step_by(c).copied().collect();
            let pb: Vec<f64> = fb.iter().skip(ch).step_by(c).copied().collect();
            acc += ssim_plane(&pa, &pb, h, w, peak)?;
        }
        out.push(acc / c as f64);
    }
    Ok(out)
}

/// Single-scale SSIM (11x11 Gaussian window, sigma 1.5), averaged over frames and channels.
pub fn ssim(a: &VideoTensor, b: &VideoTensor, peak: f64) -> Result<f64> {
    let per_frame = ssim_per_frame(a, b, peak)?;
    Ok(per_frame.iter().sum::<f64>() / per_frame.len() as f64)
}

/// `sqrt(||a - b||^2 + eps^2)` over the whole tensor.
pub fn charbonnier(a: &VideoTensor, b: &VideoTensor, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(invalid("charbonnier epsilon must be positive"));
    }
    let d = a.axpby(1.0, b, -1.0)?;
    Ok(libm::sqrt(d.norm_sq() + eps * eps))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub color_space: ColorSpace,
    pub psnr_per_frame: Vec<f64>,
    pub ssim_per_frame: Vec<f64>,
    pub mean_psnr: f64,
    pub mean_ssim: f64,
    pub charbonnier: Option<f64>,
}

impl MetricReport {
    /// Compares `test` against `reference`. Charbonnier uses all channels with
    /// `eps = 1e-3` regardless of the color space.
    pub fn compute(reference: &VideoTensor, test: &VideoTensor, color_space: ColorSpace, peak: f64) -> Result<Self> {
        reference.check_same_dims(test)?;
        let (a, b) = match color_space {
            ColorSpace::Rgb => (reference.clone(), test.clone()),
            ColorSpace::Luma => (to_luma(reference)?, to_luma(test)?),
        };
        let psnr_per_frame = psnr_per_frame(&a, &b, peak)?;
        let ssim_per_frame = ssim_per_frame(&a, &b, peak)?;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        Ok(Self {
            color_space,
            mean_psnr: mean(&psnr_per_frame),
            mean_ssim: mean(&ssim_per_frame),
            psnr_per_frame,
            ssim_per_frame,
            charbonnier: Some(charbonnier(reference, test, 1e-3)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(seed: f64) -> VideoTensor {
        VideoTensor::from_fn([2, 16, 16], 3, |t, h, w, c| {
            0.5 + 0.4 * libm::sin(seed + t as f64 + h as f64 * 0.7 + w as f64 * 1.3 + c as f64 * 0.5)
        })
        .unwrap()
    }

    #[test]
    fn psnr_offsets() {
        let a = textured(0.0);
        assert_eq!(psnr(&a, &a, 1.0).unwrap(), f64::INFINITY);
        let b = a.map(|v| v + 1.0).unwrap();
        assert!(psnr(&a, &b, 1.0).unwrap().abs() < 1e-9);
        let c = a.map(|v| v + 0.1).unwrap();
        assert!((psnr(&a, &c, 1.0).unwrap() - 20.0).abs() < 1e-9);
        assert_eq!(psnr(&a, &c, 1.0).unwrap(), psnr(&c, &a, 1.0).unwrap());
        assert!(psnr(&a, &VideoTensor::zeros([2, 16, 16], 1).unwrap(), 1.0).is_err());
    }

    #[test]
    fn ssim_identities() {
        let a = textured(0.0);
        assert!((ssim(&a, &a, 1.0).unwrap() - 1.0).abs() < 1e-9);

        let zeros = VideoTensor::zeros([1, 11, 11], 1).unwrap();
        let ones = VideoTensor::filled([1, 11, 11], 1, 1.0).unwrap();
        let want = 1e-4 / 1.0001;
        assert!((ssim(&zeros, &ones, 1.0).unwrap() - want).abs() < 1e-12);

        let centered =
            VideoTensor::from_fn([2, 16, 16], 1, |t, h, w, _| if (t + h + w) % 2 == 0 { 0.3 } else { -0.3 }).unwrap();
        let negated = centered.map(|v| -v).unwrap();
        assert!(ssim(&centered, &negated, 1.0).unwrap() <= 0.0);

        let b = textured(0.4);
        let ab = ssim(&a, &b, 1.0).unwrap();
        assert!((ab - ssim(&b, &a, 1.0).unwrap()).abs() < 1e-12);
        assert!((-1.0..=1.0).contains(&ab));

        let small = VideoTensor::zeros([1, 10, 16], 1).unwrap();
        assert!(matches!(ssim(&small, &small, 1.0), Err(Error::FrameTooSmall { .. })));
    }

    #[test]
    fn charbonnier_bounds() {
        let a = textured(0.0);
        assert!((charbonnier(&a, &a, 1e-3).unwrap() - 1e-3).abs() < 1e-18);
        let one = VideoTensor::filled([1, 1, 1], 1, 1.0).unwrap();
        let zero = VideoTensor::zeros([1, 1, 1], 1).unwrap();
        assert!((charbonnier(&one, &zero, 1e-9).unwrap() - 1.0).abs() < 1e-12);
        let b = textured(1.0);
        let dist = libm::sqrt(a.axpby(1.0, &b, -1.0).unwrap().norm_sq());
        let v = charbonnier(&a, &b, 0.5).unwrap();
        assert!(v >= dist && v >= 0.5);
        assert!((charbonnier(&a, &b, 1e-9).unwrap() - dist).abs() < 1e-12);
    }

    #[test]
    fn luma_of_white_and_black() {
        let white = VideoTensor::filled([1, 1, 1], 3, 1.0).unwrap();
        let black = VideoTensor::zeros([1, 1, 1], 3).unwrap();
        assert!((to_luma(&white).unwrap().as_slice()[0] - 235.0 / 255.0).abs() < 1e-12);
        assert!((to_luma(&black).unwrap().as_slice()[0] - 16.0 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn report_of_identical_inputs() {
        let a = textured(0.0);
        let r = MetricReport::compute(&a, &a, ColorSpace::Rgb, 1.0).unwrap();
        assert_eq!(r.mean_psnr, f64::INFINITY);
        assert!((r.mean_ssim - 1.0).abs() < 1e-9);
        assert_eq!(r.psnr_per_frame.len(), 2);
        assert_eq!(r.charbonnier, Some(1e-3));
    }
}
