#![allow(dead_code)]

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use stvsr_core::{Extent, Kernel3D, VideoTensor};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

pub fn random_video(rng: &mut ChaCha8Rng, extent: Extent, channels: usize) -> VideoTensor {
    VideoTensor::from_fn(extent, channels, |_, _, _, _| uniform(rng)).unwrap()
}

/// Positive random taps, normalized, origin at the middle tap.
pub fn random_kernel(rng: &mut ChaCha8Rng, extent: Extent) -> Kernel3D {
    let n = extent[0] * extent[1] * extent[2];
    let taps = (0..n).map(|_| 0.1 + uniform(rng)).collect();
    Kernel3D::new(extent, extent.map(|e| e / 2), taps).unwrap().normalized().unwrap()
}
