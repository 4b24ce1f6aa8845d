//! Separable interpolation used to seed the iteration and as a baseline.

use alloc::vec;
use alloc::vec::Vec;

use crate::degradation::cubic_weight;
use crate::error::Result;
use crate::fdt::upsample_zero;
use crate::tensor::{ScaleFactor, VideoTensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InitMode {
    /// Linear in t, h and w with output sample `j` at input coordinate `j / s`
    /// and the last sample replicated past the end.
    Trilinear,
    /// Each output sample copies input sample `j / s` (rounded down).
    Nearest,
    /// Zero-fill upsampling.
    ZeroFill,
}

impl InitMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Trilinear => "trilinear",
            Self::Nearest => "nearest",
            Self::ZeroFill => "zero_fill",
        }
    }
}

type Taps = Vec<(usize, f64)>;

/// Resamples one axis; `taps(j)` lists the input indices and weights feeding
/// output index `j`.
fn resample_axis(v: &VideoTensor, axis: usize, out_len: usize, taps: impl Fn(usize) -> Taps) -> VideoTensor {
    let src = v.extent();
    let mut dst = src;
    dst[axis] = out_len;
    let c = v.channels();
    let table: Vec<Taps> = (0..out_len).map(taps).collect();
    let mut data = vec![0.0; dst[0] * dst[1] * dst[2] * c];
    for t in 0..dst[0] {
        for h in 0..dst[1] {
            for w in 0..dst[2] {
                let out_idx = [t, h, w];
                let base = ((t * dst[1] + h) * dst[2] + w) * c;
                for &(i, weight) in &table[out_idx[axis]] {
                    let mut s = out_idx;
                    s[axis] = i;
                    let src_base = v.index(s[0], s[1], s[2], 0);
                    for ch in 0..c {
                        data[base + ch] += weight * v.as_slice()[src_base + ch];
                    }
                }
            }
        }
    }
    VideoTensor::from_vec(dst, c, data).expect("resampled shape is valid")
}

fn linear_taps(n: usize, s: usize) -> impl Fn(usize) -> Taps {
    move |j| {
        let i0 = j / s;
        let frac = (j % s) as f64 / s as f64;
        if i0 + 1 >= n || frac == 0.0 {
            vec![(i0.min(n - 1), 1.0)]
        } else {
            vec![(i0, 1.0 - frac), (i0 + 1, frac)]
        }
    }
}

/// Area-aligned bicubic taps with replicated borders.
fn cubic_taps(n: usize, s: usize) -> impl Fn(usize) -> Taps {
    move |j| {
        let x = (j as f64 + 0.5) / s as f64 - 0.5;
        let base = libm::floor(x) as isize;
        let taps: Vec<(usize, f64)> =
            (base - 1..=base + 2).map(|p| (p.clamp(0, n as isize - 1) as usize, cubic_weight(x - p as f64))).collect();
        let sum: f64 = taps.iter().map(|t| t.1).sum();
        taps.into_iter().map(|(i, w)| (i, w / sum)).collect()
    }
}

/// First iterate on the high-resolution grid.
pub fn init_x0(y: &VideoTensor, scale: ScaleFactor, mode: InitMode) -> VideoTensor {
    let s = scale.as_array();
    match mode {
        InitMode::ZeroFill => upsample_zero(y, scale),
        InitMode::Trilinear | InitMode::Nearest => {
            let mut v = y.clone();
            for (axis, &factor) in s.iter().enumerate() {
                if factor == 1 {
                    continue;
                }
                let n = v.extent()[axis];
                v = match mode {
                    InitMode::Trilinear => resample_axis(&v, axis, n * factor, linear_taps(n, factor)),
                    _ => resample_axis(&v, axis, n * factor, move |j| vec![(j / factor, 1.0)]),
                };
            }
            v
        }
    }
}

/// Linear interpolation in time followed by bicubic upscaling in space.
pub fn bicubic_linear_upscale(y: &VideoTensor, scale: ScaleFactor) -> Result<VideoTensor> {
    let mut v = y.clone();
    if scale.t > 1 {
        let n = v.frames();
        v = resample_axis(&v, 0, n * scale.t, linear_taps(n, scale.t));
    }
    for (axis, factor) in [(1, scale.h), (2, scale.w)] {
        if factor > 1 {
            let n = v.extent()[axis];
            v = resample_axis(&v, axis, n * factor, cubic_taps(n, factor));
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_scale_is_identity() {
        let y = VideoTensor::from_fn([2, 3, 4], 3, |t, h, w, c| (t + 2 * h + 3 * w + c) as f64 * 0.01).unwrap();
        for mode in [InitMode::Trilinear, InitMode::Nearest, InitMode::ZeroFill] {
            assert_eq!(init_x0(&y, ScaleFactor::unit(), mode), y);
        }
        assert_eq!(bicubic_linear_upscale(&y, ScaleFactor::unit()).unwrap(), y);
    }

    #[test]
    fn nearest_replicates() {
        let y = VideoTensor::filled([1, 1, 1], 1, 0.8).unwrap();
        let x = init_x0(&y, ScaleFactor::new(2, 2, 2).unwrap(), InitMode::Nearest);
        assert_eq!(x.extent(), [2, 2, 2]);
        assert!(x.as_slice().iter().all(|&v| v == 0.8));
    }

    #[test]
    fn trilinear_with_replicated_border() {
        let y = VideoTensor::from_vec([1, 1, 2], 1, vec![0.0, 1.0]).unwrap();
        let x = init_x0(&y, ScaleFactor::new(1, 1, 2).unwrap(), InitMode::Trilinear);
        assert_eq!(x.as_slice(), &[0.0, 0.5, 1.0, 1.0]);
    }

    #[test]
    fn bicubic_preserves_constants() {
        let y = VideoTensor::filled([2, 4, 4], 3, 0.4).unwrap();
        let x = bicubic_linear_upscale(&y, ScaleFactor::new(2, 4, 4).unwrap()).unwrap();
        assert_eq!(x.dims(), [4, 16, 16, 3]);
        assert!(x.as_slice().iter().all(|v| (v - 0.4).abs() < 1e-12));
    }
}
