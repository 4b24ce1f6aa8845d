//! Forward model: circular 3-D blur, phase-0 decimation, additive white
//! Gaussian noise. Also the kernel factories used for data synthesis.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::kernel::Kernel3D;
use crate::spectrum::{fft3_plane, ifft3_plane, kernel_to_otf};
use crate::tensor::{ScaleFactor, VideoTensor};

#[derive(Clone, Debug, PartialEq)]
pub struct DegradationSpec {
    pub kernel: Kernel3D,
    pub scale: ScaleFactor,
    /// Standard deviation on the `[0, 1]` intensity scale.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl DegradationSpec {
    pub fn new(kernel: Kernel3D, scale: ScaleFactor, noise_sigma: f64, seed: u64) -> Result<Self> {
        let spec = Self { kernel, scale, noise_sigma, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(invalid("noise sigma must be finite and non-negative"));
        }
        ScaleFactor::new(self.scale.t, self.scale.h, self.scale.w)?;
        Ok(())
    }
}

/// Circular 3-D convolution of every channel with `kernel`, evaluated in the
/// frequency domain.
pub fn conv3_circular(x: &VideoTensor, kernel: &Kernel3D) -> Result<VideoTensor> {
    let extent = x.extent();
    kernel.check_fits(extent)?;
    if kernel.extent() == [1, 1, 1] {
        let gain = kernel.taps()[0];
        return x.map(|v| gain * v);
    }
    let otf = kernel_to_otf(kernel, extent)?;
    x.map_planes(extent, |plane| {
        let spectrum = fft3_plane(plane, extent)?;
        ifft3_plane(&spectrum.zip_with(&otf, |a, b| a * b))
    })
}

/// Keeps samples whose indices are multiples of the scale factor.
pub fn downsample_std(x: &VideoTensor, scale: ScaleFactor) -> Result<VideoTensor> {
    let lo = scale.downscale(x.extent())?;
    let [st, sh, sw] = scale.as_array();
    VideoTensor::from_fn(lo, x.channels(), |t, h, w, c| x.get(t * st, h * sh, w * sw, c))
}

/// Adds i.i.d. `N(0, sigma^2)` noise drawn from a ChaCha20 stream seeded by `seed`.
pub fn add_gaussian_noise(x: &VideoTensor, sigma: f64, seed: u64) -> Result<VideoTensor> {
    if sigma == 0.0 {
        return Ok(x.clone());
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let data = x
        .as_slice()
        .iter()
        .map(|&v| {
            let n: f64 = StandardNormal.sample(&mut rng);
            v + sigma * n
        })
        .collect();
    VideoTensor::from_vec(x.extent(), x.channels(), data)
}

/// `Y = (X conv K) decimated by s, plus noise`.
pub fn degrade(x: &VideoTensor, spec: &DegradationSpec) -> Result<VideoTensor> {
    spec.validate()?;
    spec.scale.downscale(x.extent())?;
    let blurred = conv3_circular(x, &spec.kernel)?;
    let y = downsample_std(&blurred, spec.scale)?;
    add_gaussian_noise(&y, spec.noise_sigma, spec.seed)
}

/// Temporal box of `n` equal taps (exposure integration), origin at tap `n / 2`.
pub fn exposure_box_kernel(n: usize) -> Result<Kernel3D> {
    if n == 0 {
        return Err(invalid("exposure kernel needs at least one tap"));
    }
    Kernel3D::new([n, 1, 1], [n / 2, 0, 0], vec![1.0 / n as f64; n])
}

/// Sampled, normalized 2-D Gaussian with odd extent and unit temporal extent.
pub fn gaussian_spatial_kernel(sigma: f64, extent: [usize; 2]) -> Result<Kernel3D> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid("gaussian sigma must be positive"));
    }
    let [kh, kw] = extent;
    if kh % 2 == 0 || kw % 2 == 0 {
        return Err(invalid("gaussian kernel extents must be odd"));
    }
    let (ch, cw) = ((kh / 2) as f64, (kw / 2) as f64);
    let mut taps = Vec::with_capacity(kh * kw);
    for h in 0..kh {
        for w in 0..kw {
            let d2 = (h as f64 - ch).powi(2) + (w as f64 - cw).powi(2);
            taps.push(libm::exp(-d2 / (2.0 * sigma * sigma)));
        }
    }
    Kernel3D::new([1, kh, kw], [0, kh / 2, kw / 2], taps)?.normalized()
}

/// Keys cubic convolution kernel with `a = -0.5`.
pub fn cubic_weight(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = x.abs();
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A
    } else {
        0.0
    }
}

/// Antialiasing bicubic downscaling kernel for integer factor `s`.
///
/// Phase-0 decimation after blurring with `kernel` reproduces area-aligned
/// bicubic resizing, where output sample `i` sits at input coordinate
/// `s * i + (s - 1) / 2`. The declared origin already includes that offset.
#[derive(Clone, Debug, PartialEq)]
pub struct BicubicKernel {
    pub kernel: Kernel3D,
    /// Whole-sample part of the alignment offset, `(s - 1) / 2` rounded down.
    pub center_shift: usize,
    /// For even `s` the taps are symmetric about a point half a sample before
    /// `center - center_shift`.
    pub half_sample: bool,
}

impl BicubicKernel {
    /// Point (in tap index units) about which the taps are symmetric.
    pub fn symmetry_center(&self) -> f64 {
        let c = (self.kernel.center()[1] - self.center_shift) as f64;
        if self.half_sample {
            c - 0.5
        } else {
            c
        }
    }
}

pub fn bicubic_kernel(s: usize) -> Result<BicubicKernel> {
    if s == 0 {
        return Err(invalid("bicubic scale must be positive"));
    }
    let sf = s as f64;
    let half_sample = s.is_multiple_of(2);
    let (mut line, mut origin): (Vec<f64>, usize) = if half_sample {
        let geometric = 2.0 * sf - 0.5;
        ((0..4 * s).map(|j| cubic_weight((j as f64 - geometric) / sf)).collect(), 2 * s)
    } else {
        let geometric = 2 * s - 1;
        ((0..4 * s - 1).map(|j| cubic_weight((j as f64 - geometric as f64) / sf)).collect(), geometric)
    };
    // exact zeros at the ends (s = 1) carry no weight
    while line.len() > 1 && line[line.len() - 1] == 0.0 {
        line.pop();
    }
    while line.len() > 1 && line[0] == 0.0 {
        line.remove(0);
        origin -= 1;
    }
    let center_shift = (s - 1) / 2;
    let n = line.len();
    let mut taps = Vec::with_capacity(n * n);
    for &a in &line {
        for &b in &line {
            taps.push(a * b);
        }
    }
    let c = origin + center_shift;
    let kernel = Kernel3D::new([1, n, n], [0, c, c], taps)?.normalized()?;
    Ok(BicubicKernel { kernel, center_shift, half_sample })
}

/// Checks extents are compatible with degradation by `scale`.
pub fn check_degradable(extent: [usize; 3], kernel: &Kernel3D, scale: ScaleFactor) -> Result<()> {
    kernel.check_fits(extent)?;
    scale.downscale(extent)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn random_video(extent: [usize; 3], channels: usize, seed: u64) -> VideoTensor {
        let noise = VideoTensor::zeros(extent, channels).unwrap();
        add_gaussian_noise(&noise, 1.0, seed).unwrap()
    }

    #[test]
    fn delta_blur_is_identity() {
        let x = random_video([2, 4, 4], 3, 1);
        let y = conv3_circular(&x, &Kernel3D::delta()).unwrap();
        assert!(x.max_abs_diff(&y).unwrap() < 1e-12);
    }

    #[test]
    fn normalized_blur_preserves_constants_and_mean() {
        let k = exposure_box_kernel(3).unwrap().compose(&gaussian_spatial_kernel(0.8, [3, 3]).unwrap());
        let c = VideoTensor::filled([4, 6, 6], 1, 0.5).unwrap();
        let y = conv3_circular(&c, &k).unwrap();
        assert!(y.as_slice().iter().all(|v| (v - 0.5).abs() < 1e-12));
        let x = random_video([4, 6, 6], 3, 2);
        assert!((conv3_circular(&x, &k).unwrap().mean() - x.mean()).abs() < 1e-10);
        assert!(matches!(
            conv3_circular(&VideoTensor::zeros([2, 6, 6], 1).unwrap(), &k),
            Err(Error::KernelTooLarge { .. })
        ));
    }

    #[test]
    fn decimation_selects_phase_zero() {
        let ramp = VideoTensor::from_fn([1, 1, 8], 1, |_, _, w, _| w as f64).unwrap();
        let y = downsample_std(&ramp, ScaleFactor::new(1, 1, 2).unwrap()).unwrap();
        assert_eq!(y.as_slice(), &[0.0, 2.0, 4.0, 6.0]);
        assert_eq!(downsample_std(&ramp, ScaleFactor::unit()).unwrap(), ramp);
        assert!(matches!(downsample_std(&ramp, ScaleFactor::new(1, 1, 3).unwrap()), Err(Error::NotDivisible { .. })));
    }

    #[test]
    fn degrade_trivial_cases() {
        let x = random_video([2, 4, 4], 3, 5);
        let spec = DegradationSpec::new(Kernel3D::delta(), ScaleFactor::unit(), 0.0, 0).unwrap();
        assert_eq!(degrade(&x, &spec).unwrap(), x);

        let half = VideoTensor::filled([4, 8, 8], 3, 0.5).unwrap();
        let spec = DegradationSpec::new(
            gaussian_spatial_kernel(1.0, [3, 3]).unwrap(),
            ScaleFactor::new(2, 2, 2).unwrap(),
            0.0,
            0,
        )
        .unwrap();
        let y = degrade(&half, &spec).unwrap();
        assert_eq!(y.dims(), [2, 4, 4, 3]);
        assert!(y.as_slice().iter().all(|v| (v - 0.5).abs() < 1e-12));
        assert!(DegradationSpec::new(Kernel3D::delta(), ScaleFactor::unit(), -1.0, 0).is_err());
    }

    #[test]
    fn noisy_degrade_is_reproducible() {
        let x = random_video([4, 8, 8], 1, 9);
        let spec = DegradationSpec::new(exposure_box_kernel(2).unwrap(), ScaleFactor::new(2, 2, 2).unwrap(), 0.01, 42)
            .unwrap();
        let a = degrade(&x, &spec).unwrap();
        let b = degrade(&x, &spec).unwrap();
        assert!(a.as_slice().iter().zip(b.as_slice()).all(|(p, q)| p.to_bits() == q.to_bits()));
        let other = degrade(&x, &DegradationSpec { seed: 43, ..spec }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn exposure_box() {
        assert_eq!(exposure_box_kernel(1).unwrap(), Kernel3D::delta());
        let k5 = exposure_box_kernel(5).unwrap();
        assert_eq!(k5.taps(), &[0.2; 5]);
        assert_eq!(k5.center(), [2, 0, 0]);
        assert!(exposure_box_kernel(0).is_err());

        let alternating = VideoTensor::from_fn([6, 2, 2], 1, |t, _, _, _| (t % 2) as f64).unwrap();
        let y = conv3_circular(&alternating, &exposure_box_kernel(2).unwrap()).unwrap();
        assert!(y.as_slice().iter().all(|v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn gaussian_kernel_shape() {
        let tiny = gaussian_spatial_kernel(0.01, [3, 3]).unwrap();
        assert!(tiny.tap(0, 1, 1) >= 1.0 - 1e-6);

        let g = gaussian_spatial_kernel(1.0, [3, 3]).unwrap();
        for h in 0..3 {
            for w in 0..3 {
                assert_eq!(g.tap(0, h, w), g.tap(0, 2 - h, w));
                assert_eq!(g.tap(0, h, w), g.tap(0, h, 2 - w));
                assert_eq!(g.tap(0, h, w), g.tap(0, w, h));
            }
        }

        let g5 = gaussian_spatial_kernel(1.0, [5, 5]).unwrap();
        let raw = |dh: f64, dw: f64| libm::exp(-(dh * dh + dw * dw) / 2.0);
        let z: f64 = (0..25).map(|i| raw((i / 5) as f64 - 2.0, (i % 5) as f64 - 2.0)).sum();
        for i in 0..25 {
            let want = raw((i / 5) as f64 - 2.0, (i % 5) as f64 - 2.0) / z;
            assert!((g5.taps()[i] - want).abs() < 1e-15);
        }
        assert!((g5.sum() - 1.0).abs() < 1e-12);

        assert!(gaussian_spatial_kernel(0.0, [3, 3]).is_err());
        assert!(gaussian_spatial_kernel(1.0, [4, 3]).is_err());
    }

    #[test]
    fn bicubic_factories() {
        assert_eq!(bicubic_kernel(1).unwrap().kernel, Kernel3D::delta());
        for s in [2usize, 3, 4] {
            let b = bicubic_kernel(s).unwrap();
            let k = &b.kernel;
            assert!((k.sum() - 1.0).abs() < 1e-12);
            let n = k.extent()[1];
            let mid = b.symmetry_center();
            assert_eq!(b.half_sample, s % 2 == 0);
            for h in 0..n {
                let mirror = 2.0 * mid - h as f64;
                if mirror >= 0.0 && (mirror as usize) < n {
                    let m = mirror as usize;
                    assert!((k.tap(0, h, 0) - k.tap(0, m, 0)).abs() < 1e-15, "s = {s}");
                }
            }
        }
    }
}
