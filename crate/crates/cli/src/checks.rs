//! Randomized solver-vs-oracle sweeps and runtime scaling measurements.

use std::time::Instant;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use stvsr_core::{
    dense_oracle_solve, exposure_box_kernel, fdt_solve, gaussian_spatial_kernel, Extent, FdtContext, Kernel3D,
    ScaleFactor, VideoTensor,
};

use crate::error::Result;

fn uniform(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn random_video(rng: &mut ChaCha20Rng, extent: Extent, channels: usize) -> Result<VideoTensor> {
    Ok(VideoTensor::from_fn(extent, channels, |_, _, _, _| uniform(rng))?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelFamily {
    Delta,
    TemporalBox3,
    Gaussian3x3,
    Random3x3x3,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 4] = [Self::Delta, Self::TemporalBox3, Self::Gaussian3x3, Self::Random3x3x3];

    fn extent(self) -> Extent {
        match self {
            Self::Delta => [1, 1, 1],
            Self::TemporalBox3 => [3, 1, 1],
            Self::Gaussian3x3 => [1, 3, 3],
            Self::Random3x3x3 => [3, 3, 3],
        }
    }

    fn build(self, rng: &mut ChaCha20Rng) -> Result<Kernel3D> {
        Ok(match self {
            Self::Delta => Kernel3D::delta(),
            Self::TemporalBox3 => exposure_box_kernel(3)?,
            Self::Gaussian3x3 => gaussian_spatial_kernel(1.0, [3, 3])?,
            Self::Random3x3x3 => {
                let taps = (0..27).map(|_| 0.05 + uniform(rng)).collect();
                Kernel3D::new([3, 3, 3], [1, 1, 1], taps)?.normalized()?
            }
        })
    }
}

/// One point of the shape/scale/kernel/alpha grid.
#[derive(Clone, Copy, Debug)]
pub struct GridPoint {
    pub hstr: Extent,
    pub scale: [usize; 3],
    pub kernel: KernelFamily,
    pub alpha: f64,
}

/// Shapes {2,4}x{4,8}x{4,8}, scales {1,2}^3, four kernel families and
/// alpha in {1e-3, 0.1, 10}; combinations where the kernel does not fit are left out.
pub fn equivalence_grid() -> Vec<GridPoint> {
    let mut grid = Vec::new();
    for t in [2, 4] {
        for h in [4, 8] {
            for w in [4, 8] {
                for st in [1, 2] {
                    for sh in [1, 2] {
                        for sw in [1, 2] {
                            for kernel in KernelFamily::ALL {
                                if (0..3).any(|i| kernel.extent()[i] > [t, h, w][i]) {
                                    continue;
                                }
                                for alpha in [1e-3, 0.1, 10.0] {
                                    grid.push(GridPoint { hstr: [t, h, w], scale: [st, sh, sw], kernel, alpha });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    grid
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub trials: usize,
    pub max_deviation: f64,
    pub worst: Option<GridPoint>,
}

/// Runs `trials` random instances through both solvers. Trials walk a seeded
/// shuffle of the grid, wrapping around when `trials` exceeds its size.
pub fn oracle_sweep(seed: u64, trials: usize) -> Result<SweepResult> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut grid = equivalence_grid();
    for i in (1..grid.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        grid.swap(i, j);
    }
    let mut result = SweepResult { trials, max_deviation: 0.0, worst: None };
    for i in 0..trials {
        let point = grid[i % grid.len()];
        let [st, sh, sw] = point.scale;
        let scale = ScaleFactor::new(st, sh, sw)?;
        let kernel = point.kernel.build(&mut rng)?;
        let channels = if rng.next_u32() % 2 == 0 { 1 } else { 3 };
        let x = random_video(&mut rng, point.hstr, channels)?;
        let y = random_video(&mut rng, scale.downscale(point.hstr)?, channels)?;
        let ctx = FdtContext::new(&kernel, scale, y.extent(), point.alpha)?;
        let fast = fdt_solve(&x, &y, &ctx)?;
        let dense = dense_oracle_solve(&x, &y, &kernel, scale, point.alpha)?;
        let dev = fast.max_abs_diff(&dense)?;
        if dev > result.max_deviation || result.worst.is_none() {
            result.max_deviation = result.max_deviation.max(dev);
            result.worst = Some(point);
        }
    }
    Ok(result)
}

/// HSTR extent used for a benchmark size of `2^exp` samples: time stays at
/// most 16 frames and the spatial side takes the rest.
pub fn bench_extent(exp: u32) -> Extent {
    let t_exp = (exp.saturating_sub(8) / 2).clamp(1, 4);
    let rest = exp - t_exp;
    [1 << t_exp, 1 << (rest / 2), 1 << (rest - rest / 2)]
}

pub fn bench_kernel() -> Result<Kernel3D> {
    Ok(exposure_box_kernel(2)?.compose(&gaussian_spatial_kernel(1.2, [3, 3])?))
}

/// Best-of-`repeats` wall time of one single-channel `fdt_solve` at `extent`
/// with s = (2, 2, 2). The context (kernel spectrum) is built outside the timer.
pub fn time_fdt(extent: Extent, repeats: usize) -> Result<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(extent.iter().product::<usize>() as u64);
    let scale = ScaleFactor::new(2, 2, 2)?;
    let x = random_video(&mut rng, extent, 1)?;
    let y = random_video(&mut rng, scale.downscale(extent)?, 1)?;
    let ctx = FdtContext::new(&bench_kernel()?, scale, y.extent(), 0.1)?;
    let mut best = f64::INFINITY;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let z = fdt_solve(&x, &y, &ctx)?;
        best = best.min(start.elapsed().as_secs_f64());
        std::hint::black_box(z);
    }
    Ok(best)
}

/// Wall time of one dense oracle solve (matrix build, factorization and solve).
pub fn time_dense(extent: Extent) -> Result<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let scale = ScaleFactor::new(2, 2, 2)?;
    let x = random_video(&mut rng, extent, 1)?;
    let y = random_video(&mut rng, scale.downscale(extent)?, 1)?;
    let kernel = bench_kernel()?;
    let start = Instant::now();
    let z = dense_oracle_solve(&x, &y, &kernel, scale, 0.1)?;
    let secs = start.elapsed().as_secs_f64();
    std::hint::black_box(z);
    Ok(secs)
}

/// Least-squares slope of `ln(seconds)` against `ln(n)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, t)| (n.ln(), t.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_covers_every_family() {
        let grid = equivalence_grid();
        assert!(grid.len() >= 200);
        for family in KernelFamily::ALL {
            assert!(grid.iter().any(|p| p.kernel == family));
        }
        assert!(!grid.iter().any(|p| p.kernel == KernelFamily::Random3x3x3 && p.hstr[0] == 2));
    }

    #[test]
    fn bench_extents() {
        assert_eq!(bench_extent(12), [4, 32, 32]);
        assert_eq!(bench_extent(15), [8, 64, 64]);
        assert_eq!(bench_extent(18), [16, 128, 128]);
        assert_eq!(bench_extent(9), [2, 16, 16]);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [10.0f64, 100.0, 1000.0].iter().map(|&n| (n, 3.0 * n.powf(1.5))).collect();
        assert!((loglog_slope(&pts) - 1.5).abs() < 1e-12);
    }
}
