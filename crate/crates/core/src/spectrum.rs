//! 3-D spectra over `(t, h, w)`.
//!
//! Forward transforms are unnormalized; the inverse divides by `T * H * W`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::kernel::Kernel3D;
use crate::tensor::{volume, Extent, VideoTensor};

/// Imaginary residue above which an inverse transform is rejected.
pub const IMAGINARY_RESIDUE_LIMIT: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSpectrum {
    extent: Extent,
    data: Vec<Complex64>,
}

impl ComplexSpectrum {
    pub fn zeros(extent: Extent) -> Self {
        Self { extent, data: vec![Complex64::new(0.0, 0.0); volume(extent)] }
    }

    pub fn from_vec(extent: Extent, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != volume(extent) {
            return Err(Error::SampleCount { expected: volume(extent), found: data.len() });
        }
        Ok(Self { extent, data })
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn index(&self, t: usize, h: usize, w: usize) -> usize {
        (t * self.extent[1] + h) * self.extent[2] + w
    }

    #[inline]
    pub fn get(&self, t: usize, h: usize, w: usize) -> Complex64 {
        self.data[self.index(t, h, w)]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { extent: self.extent, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// Elementwise combination; panics on extent mismatch.
    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.extent, other.extent, "spectrum extents differ");
        Self { extent: self.extent, data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect() }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// `sum a * conj(b)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.extent, other.extent, "spectrum extents differ");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.extent, other.extent, "spectrum extents differ");
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| f64::max(m, (a - b).norm()))
    }

    /// Largest `|S[u] - conj(S[-u])|`; zero for spectra of real signals.
    pub fn hermitian_error(&self) -> f64 {
        let [et, eh, ew] = self.extent;
        let mut worst: f64 = 0.0;
        for t in 0..et {
            for h in 0..eh {
                for w in 0..ew {
                    let mirror = self.get((et - t) % et, (eh - h) % eh, (ew - w) % ew);
                    worst = worst.max((self.get(t, h, w) - mirror.conj()).norm());
                }
            }
        }
        worst
    }
}

/// Runs 1-D transforms along every axis of a row-major `(t, h, w)` buffer.
fn transform3(extent: Extent, data: &mut [Complex64], inverse: bool) {
    let [et, eh, ew] = extent;
    let strides = [eh * ew, ew, 1];
    let mut line = Vec::new();
    let mut scratch = Vec::new();
    for axis in 0..3 {
        let n = extent[axis];
        if n == 1 {
            continue;
        }
        let plan = FftPlan::new(n);
        let stride = strides[axis];
        line.resize(n, Complex64::new(0.0, 0.0));
        let starts = (0..et).flat_map(|t| (0..eh).flat_map(move |h| (0..ew).map(move |w| [t, h, w])));
        for start in starts.filter(|idx| idx[axis] == 0) {
            let base = start[0] * strides[0] + start[1] * strides[1] + start[2];
            for (i, v) in line.iter_mut().enumerate() {
                *v = data[base + i * stride];
            }
            if inverse {
                plan.inverse(&mut line, &mut scratch);
            } else {
                plan.forward(&mut line, &mut scratch);
            }
            for (i, v) in line.iter().enumerate() {
                data[base + i * stride] = *v;
            }
        }
    }
}

/// Forward transform of one real `(t, h, w)` plane.
pub fn fft3_plane(plane: &[f64], extent: Extent) -> Result<ComplexSpectrum> {
    if plane.len() != volume(extent) {
        return Err(Error::SampleCount { expected: volume(extent), found: plane.len() });
    }
    let mut data: Vec<Complex64> = plane.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform3(extent, &mut data, false);
    Ok(ComplexSpectrum { extent, data })
}

/// Forward 3-D DFT of one channel of `video`.
pub fn fft3(video: &VideoTensor, channel: usize) -> Result<ComplexSpectrum> {
    fft3_plane(&video.plane(channel)?, video.extent())
}

/// Normalized inverse transform, discarding the imaginary part after checking
/// it is negligible.
pub fn ifft3_plane(spectrum: &ComplexSpectrum) -> Result<Vec<f64>> {
    let mut data = spectrum.data.clone();
    transform3(spectrum.extent, &mut data, true);
    let scale = 1.0 / data.len() as f64;
    let mut residue: f64 = 0.0;
    let mut out = Vec::with_capacity(data.len());
    for v in &data {
        residue = residue.max((v.im * scale).abs());
        out.push(v.re * scale);
    }
    if !(residue <= IMAGINARY_RESIDUE_LIMIT) {
        return Err(Error::ImaginaryResidue(residue));
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("inverse FFT"));
    }
    Ok(out)
}

/// Inverse 3-D DFT as a single-channel video.
pub fn ifft3(spectrum: &ComplexSpectrum) -> Result<VideoTensor> {
    VideoTensor::from_vec(spectrum.extent, 1, ifft3_plane(spectrum)?)
}

/// Embeds `kernel` circularly (origin tap at index 0, negative offsets wrapped
/// to the end) in a zero volume of `extent` and transforms it.
pub fn kernel_to_otf(kernel: &Kernel3D, extent: Extent) -> Result<ComplexSpectrum> {
    kernel.check_fits(extent)?;
    if kernel.extent() == [1, 1, 1] {
        let gain = Complex64::new(kernel.taps()[0], 0.0);
        return Ok(ComplexSpectrum { extent, data: vec![gain; volume(extent)] });
    }
    let mut plane = vec![0.0; volume(extent)];
    for (off, weight) in kernel.offsets() {
        let idx: [usize; 3] = core::array::from_fn(|i| off[i].rem_euclid(extent[i] as isize) as usize);
        plane[(idx[0] * extent[1] + idx[1]) * extent[2] + idx[2]] += weight;
    }
    fft3_plane(&plane, extent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pseudo_random(extent: Extent, seed: u64) -> Vec<f64> {
        let mut s = seed;
        (0..volume(extent))
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect()
    }

    #[test]
    fn zero_and_constant_spectra() {
        let z = VideoTensor::zeros([2, 3, 4], 1).unwrap();
        assert_eq!(fft3(&z, 0).unwrap(), ComplexSpectrum::zeros([2, 3, 4]));
        let c = VideoTensor::filled([2, 3, 4], 3, 0.7).unwrap();
        let s = fft3(&c, 2).unwrap();
        assert!((s.get(0, 0, 0) - Complex64::new(0.7 * 24.0, 0.0)).norm() < 1e-10);
        for (i, v) in s.as_slice().iter().enumerate().skip(1) {
            assert!(v.norm() < 1e-10, "bin {i}");
        }
        assert!(matches!(fft3(&c, 3), Err(Error::ChannelOutOfRange { .. })));
    }

    #[test]
    fn inverse_of_dc_and_zero() {
        let mut dc = ComplexSpectrum::zeros([2, 2, 3]);
        dc.as_mut_slice()[0] = Complex64::new(12.0, 0.0);
        let v = ifft3(&dc).unwrap();
        assert!(v.as_slice().iter().all(|&x| (x - 1.0).abs() < 1e-12));
        let z = ifft3(&ComplexSpectrum::zeros([2, 2, 3])).unwrap();
        assert!(z.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn rejects_non_hermitian_spectrum() {
        let mut s = ComplexSpectrum::zeros([1, 1, 4]);
        s.as_mut_slice()[1] = Complex64::new(0.0, 1.0);
        assert!(matches!(ifft3(&s), Err(Error::ImaginaryResidue(_))));
    }

    #[test]
    fn round_trip_and_hermitian() {
        for extent in [[4, 8, 8], [3, 5, 6], [1, 1, 7]] {
            let x = pseudo_random(extent, 3);
            let s = fft3_plane(&x, extent).unwrap();
            assert!(s.hermitian_error() < 1e-10);
            let back = ifft3_plane(&s).unwrap();
            for (a, b) in back.iter().zip(&x) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn delta_otf_is_all_ones() {
        let otf = kernel_to_otf(&Kernel3D::delta(), [2, 4, 3]).unwrap();
        assert!(otf.as_slice().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn temporal_box_otf_matches_wrapped_dft() {
        // taps at offsets -1 and 0 embed as [1/2, 0, 0, 1/2]
        let k = Kernel3D::new([2, 1, 1], [1, 0, 0], vec![0.5, 0.5]).unwrap();
        let otf = kernel_to_otf(&k, [4, 1, 1]).unwrap();
        let want =
            [Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.5), Complex64::new(0.0, 0.0), Complex64::new(0.5, -0.5)];
        for (got, want) in otf.as_slice().iter().zip(want) {
            assert!((got - want).norm() < 1e-12);
        }
        assert!(kernel_to_otf(&k, [1, 1, 1]).is_err());
    }
}
