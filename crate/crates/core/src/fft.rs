//! One-dimensional complex FFT plans: iterative radix-2 for power-of-two
//! lengths, Bluestein's chirp-z reduction otherwise.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

fn unit(angle: f64) -> Complex64 {
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

#[derive(Clone, Debug)]
struct Radix2 {
    n: usize,
    // e^{-2 pi i k / n}, k < n/2
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let twiddles = (0..n / 2).map(|k| unit(-2.0 * PI * k as f64 / n as f64)).collect();
        Self { n, twiddles }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let n = self.n;
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

#[derive(Clone, Debug)]
struct Bluestein {
    n: usize,
    chirp: Vec<Complex64>,
    filter: Vec<Complex64>,
    inner: Radix2,
}

impl Bluestein {
    fn new(n: usize) -> Self {
        let m = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(m);
        // k^2 reduced mod 2n keeps the angle argument small
        let chirp: Vec<Complex64> = (0..n)
            .map(|k| {
                let k2 = (k as u128 * k as u128 % (2 * n as u128)) as f64;
                unit(-PI * k2 / n as f64)
            })
            .collect();
        let mut filter = vec![Complex64::new(0.0, 0.0); m];
        filter[0] = chirp[0].conj();
        for k in 1..n {
            filter[k] = chirp[k].conj();
            filter[m - k] = chirp[k].conj();
        }
        inner.forward(&mut filter);
        Self { n, chirp, filter, inner }
    }

    fn forward(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let m = self.inner.n;
        scratch.clear();
        scratch.resize(m, Complex64::new(0.0, 0.0));
        for k in 0..self.n {
            scratch[k] = buf[k] * self.chirp[k];
        }
        self.inner.forward(scratch);
        for (s, f) in scratch.iter_mut().zip(&self.filter) {
            *s *= f;
        }
        // inverse via conjugation
        for s in scratch.iter_mut() {
            *s = s.conj();
        }
        self.inner.forward(scratch);
        let scale = 1.0 / m as f64;
        for k in 0..self.n {
            buf[k] = scratch[k].conj() * scale * self.chirp[k];
        }
    }
}

#[derive(Clone, Debug)]
enum Algorithm {
    Radix2(Radix2),
    Bluestein(Bluestein),
}

/// Unnormalized forward DFT of a fixed length.
#[derive(Clone, Debug)]
pub struct FftPlan {
    algorithm: Algorithm,
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "FFT length must be positive");
        let algorithm = if n.is_power_of_two() {
            Algorithm::Radix2(Radix2::new(n))
        } else {
            Algorithm::Bluestein(Bluestein::new(n))
        };
        Self { algorithm }
    }

    pub fn len(&self) -> usize {
        match &self.algorithm {
            Algorithm::Radix2(p) => p.n,
            Algorithm::Bluestein(p) => p.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place `X[k] = sum_j x[j] e^{-2 pi i jk/n}`.
    pub fn forward(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        assert_eq!(buf.len(), self.len());
        match &self.algorithm {
            Algorithm::Radix2(p) => p.forward(buf),
            Algorithm::Bluestein(p) => p.forward(buf, scratch),
        }
    }

    /// In-place unnormalized inverse, `x[j] = sum_k X[k] e^{+2 pi i jk/n}`.
    pub fn inverse(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        for v in buf.iter_mut() {
            *v = v.conj();
        }
        self.forward(buf, scratch);
        for v in buf.iter_mut() {
            *v = v.conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| x.iter().enumerate().map(|(j, &v)| v * unit(-2.0 * PI * ((j * k) % n) as f64 / n as f64)).sum())
            .collect()
    }

    fn signal(n: usize) -> Vec<Complex64> {
        (0..n).map(|i| Complex64::new(libm::sin(i as f64 * 0.7) + 0.3, libm::cos(i as f64 * 1.3))).collect()
    }

    #[test]
    fn matches_naive_dft_for_many_lengths() {
        let mut scratch = Vec::new();
        for n in [1usize, 2, 3, 4, 5, 6, 7, 8, 12, 15, 16, 17, 30, 64, 100] {
            let x = signal(n);
            let want = naive_dft(&x);
            let mut got = x.clone();
            FftPlan::new(n).forward(&mut got, &mut scratch);
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).norm() < 1e-10 * n as f64, "n = {n}");
            }
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let mut scratch = Vec::new();
        for n in [8usize, 9, 31] {
            let x = signal(n);
            let plan = FftPlan::new(n);
            let mut y = x.clone();
            plan.forward(&mut y, &mut scratch);
            plan.inverse(&mut y, &mut scratch);
            for (a, b) in y.iter().zip(&x) {
                assert!((a / n as f64 - b).norm() < 1e-12);
            }
        }
    }
}
