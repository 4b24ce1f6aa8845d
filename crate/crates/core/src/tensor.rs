//! Video sample container.
//!
//! Samples are stored contiguously in `(t, h, w, c)` order, so one frame is a
//! contiguous `h * w * c` run and the channel index varies fastest.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Extent of a video along `(t, h, w)`.
pub type Extent = [usize; 3];

pub(crate) fn volume(extent: Extent) -> usize {
    extent[0] * extent[1] * extent[2]
}

/// Integer downsampling factors `(s_t, s_h, s_w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScaleFactor {
    pub t: usize,
    pub h: usize,
    pub w: usize,
}

impl ScaleFactor {
    pub fn new(t: usize, h: usize, w: usize) -> Result<Self> {
        if t == 0 || h == 0 || w == 0 {
            return Err(crate::error::invalid("scale factors must be positive"));
        }
        Ok(Self { t, h, w })
    }

    pub const fn unit() -> Self {
        Self { t: 1, h: 1, w: 1 }
    }

    pub const fn as_array(&self) -> [usize; 3] {
        [self.t, self.h, self.w]
    }

    /// Total decimation count `s_t * s_h * s_w`.
    pub const fn product(&self) -> usize {
        self.t * self.h * self.w
    }

    pub fn upscale(&self, extent: Extent) -> Extent {
        [extent[0] * self.t, extent[1] * self.h, extent[2] * self.w]
    }

    /// Low-resolution extent, or an error when `extent` is not a multiple.
    pub fn downscale(&self, extent: Extent) -> Result<Extent> {
        let s = self.as_array();
        if (0..3).any(|i| !extent[i].is_multiple_of(s[i])) {
            return Err(Error::NotDivisible { shape: extent, scale: s });
        }
        Ok([extent[0] / s[0], extent[1] / s[1], extent[2] / s[2]])
    }
}

impl fmt::Display for ScaleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.t, self.h, self.w)
    }
}

/// A `T x H x W x C` block of `f64` intensities, nominally in `[0, 1]`.
#[derive(Clone, PartialEq)]
pub struct VideoTensor {
    extent: Extent,
    channels: usize,
    data: Vec<f64>,
}

impl fmt::Debug for VideoTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VideoTensor")
            .field("extent", &self.extent)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

fn check_shape(extent: Extent, channels: usize) -> Result<()> {
    if extent.contains(&0) || !(channels == 1 || channels == 3) {
        return Err(Error::InvalidShape { shape: extent, channels });
    }
    Ok(())
}

impl VideoTensor {
    pub fn zeros(extent: Extent, channels: usize) -> Result<Self> {
        Self::filled(extent, channels, 0.0)
    }

    pub fn filled(extent: Extent, channels: usize, value: f64) -> Result<Self> {
        check_shape(extent, channels)?;
        if !value.is_finite() {
            return Err(Error::NonFinite("fill value"));
        }
        Ok(Self { extent, channels, data: vec![value; volume(extent) * channels] })
    }

    /// Wraps `data` laid out in `(t, h, w, c)` order.
    pub fn from_vec(extent: Extent, channels: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(extent, channels)?;
        let expected = volume(extent) * channels;
        if data.len() != expected {
            return Err(Error::SampleCount { expected, found: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("input samples"));
        }
        Ok(Self { extent, channels, data })
    }

    pub fn from_fn(
        extent: Extent,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        check_shape(extent, channels)?;
        let mut data = Vec::with_capacity(volume(extent) * channels);
        for t in 0..extent[0] {
            for h in 0..extent[1] {
                for w in 0..extent[2] {
                    for c in 0..channels {
                        data.push(f(t, h, w, c));
                    }
                }
            }
        }
        Self::from_vec(extent, channels, data)
    }

    /// Interleaves per-channel planes (each in `(t, h, w)` order).
    pub fn from_planes(extent: Extent, planes: &[Vec<f64>]) -> Result<Self> {
        let channels = planes.len();
        check_shape(extent, channels)?;
        let n = volume(extent);
        if let Some(bad) = planes.iter().find(|p| p.len() != n) {
            return Err(Error::SampleCount { expected: n, found: bad.len() });
        }
        let mut data = vec![0.0; n * channels];
        for (c, plane) in planes.iter().enumerate() {
            for (i, &v) in plane.iter().enumerate() {
                data[i * channels + c] = v;
            }
        }
        Self::from_vec(extent, channels, data)
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    pub fn frames(&self) -> usize {
        self.extent[0]
    }

    pub fn height(&self) -> usize {
        self.extent[1]
    }

    pub fn width(&self) -> usize {
        self.extent[2]
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// `[T, H, W, C]`.
    pub fn dims(&self) -> [usize; 4] {
        [self.extent[0], self.extent[1], self.extent[2], self.channels]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn index(&self, t: usize, h: usize, w: usize, c: usize) -> usize {
        ((t * self.extent[1] + h) * self.extent[2] + w) * self.channels + c
    }

    #[inline]
    pub fn get(&self, t: usize, h: usize, w: usize, c: usize) -> f64 {
        self.data[self.index(t, h, w, c)]
    }

    /// Samples of frame `t`, `(h, w, c)` order.
    pub fn frame(&self, t: usize) -> &[f64] {
        let n = self.extent[1] * self.extent[2] * self.channels;
        &self.data[t * n..(t + 1) * n]
    }

    /// Copy of frame range `[start, end)` as a new tensor.
    pub fn frame_range(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.extent[0] {
            return Err(crate::error::invalid("frame range out of bounds"));
        }
        let n = self.extent[1] * self.extent[2] * self.channels;
        Ok(Self {
            extent: [end - start, self.extent[1], self.extent[2]],
            channels: self.channels,
            data: self.data[start * n..end * n].to_vec(),
        })
    }

    /// One channel as a dense `(t, h, w)` plane.
    pub fn plane(&self, channel: usize) -> Result<Vec<f64>> {
        self.check_channel(channel)?;
        Ok(self.data.iter().skip(channel).step_by(self.channels).copied().collect())
    }

    pub fn planes(&self) -> Vec<Vec<f64>> {
        (0..self.channels).map(|c| self.data.iter().skip(c).step_by(self.channels).copied().collect()).collect()
    }

    pub(crate) fn check_channel(&self, channel: usize) -> Result<()> {
        if channel >= self.channels {
            return Err(Error::ChannelOutOfRange { channel, channels: self.channels });
        }
        Ok(())
    }

    /// Errors unless `other` has identical dimensions.
    pub fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::ShapeMismatch { expected: self.dims(), found: other.dims() });
        }
        Ok(())
    }

    /// Applies `f` planewise, rebuilding the tensor from the results.
    pub fn map_planes(&self, extent: Extent, mut f: impl FnMut(&[f64]) -> Result<Vec<f64>>) -> Result<Self> {
        let planes = self.planes().iter().map(|p| f(p)).collect::<Result<Vec<_>>>()?;
        Self::from_planes(extent, &planes)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_vec(self.extent, self.channels, self.data.iter().map(|&v| f(v)).collect())
    }

    /// `a * self + b * other`.
    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_same_dims(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&x, &y)| a * x + b * y).collect();
        Self::from_vec(self.extent, self.channels, data)
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(x, y)| x * y).sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self.data.iter().zip(&other.data).fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs())))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Cyclic shift: sample `(t, h, w)` moves to `(t + dt, h + dh, w + dw)` modulo extent.
    pub fn circular_shift(&self, offsets: [isize; 3]) -> Self {
        let e = self.extent;
        let shift: [usize; 3] = core::array::from_fn(|i| offsets[i].rem_euclid(e[i] as isize) as usize);
        let mut data = vec![0.0; self.data.len()];
        let c = self.channels;
        for t in 0..e[0] {
            let tt = (t + shift[0]) % e[0];
            for h in 0..e[1] {
                let hh = (h + shift[1]) % e[1];
                for w in 0..e[2] {
                    let ww = (w + shift[2]) % e[2];
                    let src = self.index(t, h, w, 0);
                    let dst = self.index(tt, hh, ww, 0);
                    data[dst..dst + c].copy_from_slice(&self.data[src..src + c]);
                }
            }
        }
        Self { extent: e, channels: c, data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> VideoTensor {
        VideoTensor::from_fn([3, 4, 5], 3, |t, h, w, c| (t * 100 + h * 10 + w) as f64 + c as f64 * 0.1).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(VideoTensor::zeros([0, 1, 1], 1).is_err());
        assert!(VideoTensor::zeros([1, 1, 1], 2).is_err());
        assert!(matches!(
            VideoTensor::from_vec([1, 2, 2], 1, vec![0.0; 3]),
            Err(Error::SampleCount { expected: 4, found: 3 })
        ));
        assert!(VideoTensor::from_vec([1, 1, 1], 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn planes_round_trip() {
        let v = ramp();
        let back = VideoTensor::from_planes(v.extent(), &v.planes()).unwrap();
        assert_eq!(v, back);
        assert_eq!(v.plane(2).unwrap()[1], 1.2);
        assert!(v.plane(3).is_err());
    }

    #[test]
    fn shift_identities() {
        let v = ramp();
        assert_eq!(v.circular_shift([0, 0, 0]), v);
        assert_eq!(v.circular_shift([3, 4, 5]), v);
        assert_eq!(v.circular_shift([1, 0, 0]).circular_shift([-1, 0, 0]), v);
        let s = v.circular_shift([1, -1, 2]);
        assert_eq!(s.get(1, 3, 2, 1), v.get(0, 0, 0, 1));
        assert!((s.norm_sq() - v.norm_sq()).abs() < 1e-9);
    }

    #[test]
    fn scale_downscale() {
        let s = ScaleFactor::new(2, 2, 4).unwrap();
        assert_eq!(s.downscale([4, 8, 8]).unwrap(), [2, 4, 2]);
        assert!(s.downscale([3, 8, 8]).is_err());
        assert_eq!(s.upscale([2, 4, 2]), [4, 8, 8]);
        assert!(ScaleFactor::new(0, 1, 1).is_err());
    }
}
