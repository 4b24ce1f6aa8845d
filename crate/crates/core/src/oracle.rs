//! Brute-force reference for the data solve.
//!
//! Everything here works in the sample domain with explicit matrices and shares
//! no code with the FFT path, so it can certify [`crate::fdt::fdt_solve`].

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::Kernel3D;
use crate::tensor::{volume, Extent, ScaleFactor, VideoTensor};

/// Largest number of unknowns the dense solver accepts.
pub const DENSE_LIMIT: usize = 4096;

/// Circular convolution of one `(t, h, w)` plane by direct summation.
pub fn direct_conv3_plane(plane: &[f64], extent: Extent, kernel: &Kernel3D) -> Vec<f64> {
    let [et, eh, ew] = extent;
    let taps: Vec<_> = kernel.offsets().collect();
    let mut out = vec![0.0; plane.len()];
    for t in 0..et {
        for h in 0..eh {
            for w in 0..ew {
                let mut acc = 0.0;
                for (off, weight) in &taps {
                    let st = (t as isize - off[0]).rem_euclid(et as isize) as usize;
                    let sh = (h as isize - off[1]).rem_euclid(eh as isize) as usize;
                    let sw = (w as isize - off[2]).rem_euclid(ew as isize) as usize;
                    acc += weight * plane[(st * eh + sh) * ew + sw];
                }
                out[(t * eh + h) * ew + w] = acc;
            }
        }
    }
    out
}

/// Direct circular convolution of every channel.
pub fn direct_conv3_circular(x: &VideoTensor, kernel: &Kernel3D) -> Result<VideoTensor> {
    kernel.check_fits(x.extent())?;
    x.map_planes(x.extent(), |p| Ok(direct_conv3_plane(p, x.extent(), kernel)))
}

/// Explicit matrix of `z -> decimate(conv(z, K), s)` on one channel.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    rows: usize,
    cols: usize,
    // row-major
    matrix: Vec<f64>,
    hstr_extent: Extent,
    lstr_extent: Extent,
}

impl DenseOperator {
    /// Probes the operator with every unit vector of the high-resolution grid.
    pub fn build(kernel: &Kernel3D, scale: ScaleFactor, hstr_extent: Extent) -> Result<Self> {
        let cols = volume(hstr_extent);
        if cols > DENSE_LIMIT {
            return Err(Error::OracleTooLarge { size: cols, limit: DENSE_LIMIT });
        }
        kernel.check_fits(hstr_extent)?;
        let lstr_extent = scale.downscale(hstr_extent)?;
        let rows = volume(lstr_extent);
        let [st, sh, sw] = scale.as_array();
        let [_, eh, ew] = hstr_extent;
        let mut matrix = vec![0.0; rows * cols];
        let mut probe = vec![0.0; cols];
        for j in 0..cols {
            probe[j] = 1.0;
            let response = direct_conv3_plane(&probe, hstr_extent, kernel);
            probe[j] = 0.0;
            for lt in 0..lstr_extent[0] {
                for lh in 0..lstr_extent[1] {
                    for lw in 0..lstr_extent[2] {
                        let r = (lt * lstr_extent[1] + lh) * lstr_extent[2] + lw;
                        matrix[r * cols + j] = response[((lt * st) * eh + lh * sh) * ew + lw * sw];
                    }
                }
            }
        }
        Ok(Self { rows, cols, matrix, hstr_extent, lstr_extent })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> f64 {
        self.matrix[r * self.cols + c]
    }

    pub fn hstr_extent(&self) -> Extent {
        self.hstr_extent
    }

    pub fn lstr_extent(&self) -> Extent {
        self.lstr_extent
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.cols);
        self.matrix.chunks_exact(self.cols).map(|row| dot(row, z)).collect()
    }

    pub fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (row, &yv) in self.matrix.chunks_exact(self.cols).zip(y) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * yv;
            }
        }
        out
    }

    /// Applies the operator to every channel of `z`.
    pub fn apply_video(&self, z: &VideoTensor) -> Result<VideoTensor> {
        if z.extent() != self.hstr_extent {
            let e = self.hstr_extent;
            return Err(Error::ShapeMismatch { expected: [e[0], e[1], e[2], z.channels()], found: z.dims() });
        }
        z.map_planes(self.lstr_extent, |p| Ok(self.apply(p)))
    }

    /// Cholesky factor of `A^T A + alpha I`.
    pub fn normal_factor(&self, alpha: f64) -> Result<Cholesky> {
        let n = self.cols;
        let mut gram = vec![0.0; n * n];
        // rows are sparse: only kernel-sized support is non-zero
        let mut support = Vec::new();
        for row in self.matrix.chunks_exact(n) {
            support.clear();
            support.extend(row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i, *v)));
            for &(i, a) in &support {
                let gi = &mut gram[i * n..(i + 1) * n];
                for &(j, b) in &support {
                    gi[j] += a * b;
                }
            }
        }
        for i in 0..n {
            gram[i * n + i] += alpha;
        }
        Cholesky::factor(gram, n)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular factor `L` with `L L^T = G` for symmetric positive definite `G`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    n: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn factor(mut g: Vec<f64>, n: usize) -> Result<Self> {
        assert_eq!(g.len(), n * n);
        for i in 0..n {
            let (done, rest) = g.split_at_mut(i * n);
            let row_i = &mut rest[..n];
            for j in 0..i {
                let row_j = &done[j * n..j * n + j + 1];
                let s = row_i[j] - dot(&row_i[..j], &row_j[..j]);
                row_i[j] = s / row_j[j];
            }
            let d = row_i[i] - dot(&row_i[..i], &row_i[..i]);
            if !(d > 0.0) {
                return Err(Error::SingularSystem);
            }
            row_i[i] = libm::sqrt(d);
            for v in &mut row_i[i + 1..] {
                *v = 0.0;
            }
        }
        Ok(Self { n, lower: g })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let l = &self.lower;
        let mut x = b.to_vec();
        for i in 0..n {
            x[i] = (x[i] - dot(&l[i * n..i * n + i], &x[..i])) / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= l[k * n + i] * x[k];
            }
            x[i] = s / l[i * n + i];
        }
        x
    }
}

/// Solves `(A^T A + alpha I) z = A^T y + alpha x_prev` per channel by Cholesky.
pub fn dense_oracle_solve(
    x_prev: &VideoTensor,
    y: &VideoTensor,
    kernel: &Kernel3D,
    scale: ScaleFactor,
    alpha: f64,
) -> Result<VideoTensor> {
    if !(alpha > 0.0) {
        return Err(crate::error::invalid("alpha must be positive"));
    }
    let op = DenseOperator::build(kernel, scale, x_prev.extent())?;
    if y.extent() != op.lstr_extent || y.channels() != x_prev.channels() {
        let e = op.lstr_extent;
        return Err(Error::ShapeMismatch { expected: [e[0], e[1], e[2], x_prev.channels()], found: y.dims() });
    }
    let chol = op.normal_factor(alpha)?;
    let y_planes = y.planes();
    let planes = x_prev
        .planes()
        .iter()
        .zip(&y_planes)
        .map(|(xp, yp)| {
            let mut rhs = op.apply_adjoint(yp);
            for (r, x) in rhs.iter_mut().zip(xp) {
                *r += alpha * x;
            }
            chol.solve(&rhs)
        })
        .collect::<Vec<_>>();
    VideoTensor::from_planes(x_prev.extent(), &planes)
}

/// Relative residual `||(A^T A + alpha I) z - rhs|| / ||rhs||` of the normal
/// equations for one channel.
pub fn normal_equations_residual(op: &DenseOperator, alpha: f64, z: &[f64], y: &[f64], x_prev: &[f64]) -> f64 {
    let az = op.apply(z);
    let lhs = op.apply_adjoint(&az);
    let aty = op.apply_adjoint(y);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..z.len() {
        let rhs = aty[i] + alpha * x_prev[i];
        let r = lhs[i] + alpha * z[i] - rhs;
        num += r * r;
        den += rhs * rhs;
    }
    libm::sqrt(num) / libm::sqrt(den).max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_small_system() {
        let g = vec![4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0];
        let chol = Cholesky::factor(g.clone(), 3).unwrap();
        let x = chol.solve(&[1.0, 2.0, 3.0]);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| g[i * 3 + j] * x[j]).sum();
            assert!((r - [1.0, 2.0, 3.0][i]).abs() < 1e-12);
        }
        assert!(matches!(Cholesky::factor(vec![1.0, 2.0, 2.0, 1.0], 2), Err(Error::SingularSystem)));
    }

    #[test]
    fn delta_kernel_unit_scale() {
        let x = VideoTensor::filled([2, 2, 2], 1, 0.25).unwrap();
        let y = VideoTensor::filled([2, 2, 2], 1, 1.0).unwrap();
        let z = dense_oracle_solve(&x, &y, &Kernel3D::delta(), ScaleFactor::unit(), 0.5).unwrap();
        let want = (1.0 + 0.5 * 0.25) / 1.5;
        assert!(z.as_slice().iter().all(|v| (v - want).abs() < 1e-12));
    }

    #[test]
    fn size_guard() {
        let x = VideoTensor::zeros([2, 64, 64], 1).unwrap();
        let y = VideoTensor::zeros([2, 64, 64], 1).unwrap();
        assert!(matches!(
            dense_oracle_solve(&x, &y, &Kernel3D::delta(), ScaleFactor::unit(), 1.0),
            Err(Error::OracleTooLarge { size: 8192, .. })
        ));
    }
}
