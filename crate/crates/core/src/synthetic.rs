//! Seeded synthetic test sequences with known ground truth.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::Result;
use crate::tensor::{Extent, VideoTensor};

fn uniform(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

struct Grating {
    freq: [f64; 2],
    velocity: [f64; 2],
    phase: f64,
    amplitude: [f64; 3],
}

struct Blob {
    center: [f64; 2],
    velocity: [f64; 2],
    radius: f64,
    color: [f64; 3],
}

/// Periodic scene of drifting gratings and translating soft-edged discs,
/// clamped to `[0, 1]`. Everything wraps at the frame border so the sequence
/// is consistent with circular boundaries.
pub fn moving_patterns(extent: Extent, channels: usize, seed: u64) -> Result<VideoTensor> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let [_, eh, ew] = extent;
    let (fh, fw) = (eh as f64, ew as f64);
    let gratings: Vec<Grating> = (0..3)
        .map(|_| Grating {
            freq: [
                (1 + (rng.next_u32() % 4)) as f64 * 2.0 * PI / fh,
                (1 + (rng.next_u32() % 4)) as f64 * 2.0 * PI / fw,
            ],
            velocity: [2.0 * uniform(&mut rng) - 1.0, 2.0 * uniform(&mut rng) - 1.0],
            phase: 2.0 * PI * uniform(&mut rng),
            amplitude: core::array::from_fn(|_| 0.04 + 0.08 * uniform(&mut rng)),
        })
        .collect();
    let blobs: Vec<Blob> = (0..4)
        .map(|_| Blob {
            center: [fh * uniform(&mut rng), fw * uniform(&mut rng)],
            velocity: [3.0 * (2.0 * uniform(&mut rng) - 1.0), 3.0 * (2.0 * uniform(&mut rng) - 1.0)],
            radius: fh.min(fw) * (0.08 + 0.1 * uniform(&mut rng)),
            color: core::array::from_fn(|_| uniform(&mut rng) - 0.5),
        })
        .collect();

    let wrap = |d: f64, period: f64| d - period * libm::round(d / period);
    VideoTensor::from_fn(extent, channels, |t, h, w, c| {
        let (tf, hf, wf) = (t as f64, h as f64, w as f64);
        let mut v = 0.45;
        for g in &gratings {
            let arg = g.freq[0] * (hf - g.velocity[0] * tf) + g.freq[1] * (wf - g.velocity[1] * tf) + g.phase;
            v += g.amplitude[c % 3] * libm::sin(arg);
        }
        for b in &blobs {
            let dh = wrap(hf - b.center[0] - b.velocity[0] * tf, fh);
            let dw = wrap(wf - b.center[1] - b.velocity[1] * tf, fw);
            let r = libm::sqrt(dh * dh + dw * dw);
            // one-pixel soft edge
            let inside = (b.radius + 0.5 - r).clamp(0.0, 1.0);
            v += 0.6 * b.color[c % 3] * inside;
        }
        v.clamp(0.0, 1.0)
    })
}
