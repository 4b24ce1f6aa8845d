mod common;

use proptest::prelude::*;
use stvsr_core::oracle::{direct_conv3_circular, DenseOperator};
use stvsr_core::spectrum::{fft3_plane, ifft3_plane};
use stvsr_core::*;

#[test]
fn round_trip_random_4x8x8() {
    let mut r = common::rng(10);
    let x = common::random_video(&mut r, [4, 8, 8], 3);
    for c in 0..3 {
        let back = ifft3(&fft3(&x, c).unwrap()).unwrap();
        let plane = x.plane(c).unwrap();
        for (a, b) in back.as_slice().iter().zip(&plane) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn parseval_and_linearity() {
    let mut r = common::rng(11);
    let x = common::random_video(&mut r, [4, 6, 10], 1);
    let y = common::random_video(&mut r, [4, 6, 10], 1);
    let fx = fft3(&x, 0).unwrap();
    let fy = fft3(&y, 0).unwrap();
    let energy = x.norm_sq();
    assert!((fx.energy() / 240.0 - energy).abs() <= 1e-8 * energy);

    let (a, b) = (0.7, -2.3);
    let combo = fft3(&x.axpby(a, &y, b).unwrap(), 0).unwrap();
    let expected = fx.zip_with(&fy, |p, q| p * a + q * b);
    assert!(combo.max_abs_diff(&expected) < 1e-10);
}

#[test]
fn fft_convolution_matches_direct_sum() {
    let mut r = common::rng(12);
    let x = common::random_video(&mut r, [4, 8, 8], 3);
    let k = common::random_kernel(&mut r, [3, 3, 3]);
    let fast = conv3_circular(&x, &k).unwrap();
    let slow = direct_conv3_circular(&x, &k).unwrap();
    assert!(fast.max_abs_diff(&slow).unwrap() < 1e-10);
    assert!((fast.mean() - x.mean()).abs() < 1e-10);

    // conv equals ifft(otf * fft)
    let otf = kernel_to_otf(&k, x.extent()).unwrap();
    let plane = x.plane(1).unwrap();
    let via_otf = ifft3_plane(&fft3_plane(&plane, x.extent()).unwrap().zip_with(&otf, |a, b| a * b)).unwrap();
    let fast1 = fast.plane(1).unwrap();
    for (a, b) in via_otf.iter().zip(&fast1) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn normalized_kernels_have_unit_dc() {
    let mut r = common::rng(13);
    let kernels = [
        common::random_kernel(&mut r, [3, 3, 3]),
        exposure_box_kernel(5).unwrap(),
        gaussian_spatial_kernel(1.3, [5, 5]).unwrap(),
        bicubic_kernel(4).unwrap().kernel,
    ];
    for k in &kernels {
        assert!((k.sum() - 1.0).abs() < 1e-12);
        let otf = kernel_to_otf(k, [6, 16, 16]).unwrap();
        assert!((otf.get(0, 0, 0).re - 1.0).abs() < 1e-12);
        assert!(otf.get(0, 0, 0).im.abs() < 1e-12);
    }
}

#[test]
fn degradation_equals_dense_operator() {
    let mut r = common::rng(14);
    let s = ScaleFactor::new(2, 2, 2).unwrap();
    for kernel in [
        common::random_kernel(&mut r, [3, 3, 3]),
        exposure_box_kernel(2).unwrap().compose(&gaussian_spatial_kernel(1.0, [3, 3]).unwrap()),
    ] {
        let x = common::random_video(&mut r, [4, 8, 8], 3);
        let spec = DegradationSpec::new(kernel.clone(), s, 0.0, 0).unwrap();
        let y = degrade(&x, &spec).unwrap();
        let a = DenseOperator::build(&kernel, s, [4, 8, 8]).unwrap();
        let dense = a.apply_video(&x).unwrap();
        assert!(y.max_abs_diff(&dense).unwrap() < 1e-12);
    }
}

#[test]
fn noiseless_degradation_is_linear() {
    let mut r = common::rng(15);
    let k = common::random_kernel(&mut r, [2, 3, 3]);
    let spec = DegradationSpec::new(k, ScaleFactor::new(2, 1, 2).unwrap(), 0.0, 0).unwrap();
    let x1 = common::random_video(&mut r, [4, 6, 8], 1);
    let x2 = common::random_video(&mut r, [4, 6, 8], 1);
    let combo = degrade(&x1.axpby(1.5, &x2, -0.25).unwrap(), &spec).unwrap();
    let separate = degrade(&x1, &spec).unwrap().axpby(1.5, &degrade(&x2, &spec).unwrap(), -0.25).unwrap();
    assert!(combo.max_abs_diff(&separate).unwrap() < 1e-10);
}

#[test]
fn downsample_matches_slicing() {
    let mut r = common::rng(16);
    let x = common::random_video(&mut r, [4, 8, 8], 3);
    let y = downsample_std(&x, ScaleFactor::new(2, 2, 2).unwrap()).unwrap();
    for t in 0..2 {
        for h in 0..4 {
            for w in 0..4 {
                for c in 0..3 {
                    assert_eq!(y.get(t, h, w, c), x.get(2 * t, 2 * h, 2 * w, c));
                }
            }
        }
    }
}

/// Area-aligned bicubic resize with periodic borders, evaluated directly.
fn direct_bicubic_downscale(x: &VideoTensor, s: usize) -> VideoTensor {
    let (h, w) = (x.height(), x.width());
    let weight = |d: f64| degradation::cubic_weight(d / s as f64);
    let sample = |t: usize, i: usize, j: usize, c: usize| {
        let ci = (i as f64 + 0.5) * s as f64 - 0.5;
        let cj = (j as f64 + 0.5) * s as f64 - 0.5;
        let (mut acc, mut norm) = (0.0, 0.0);
        let reach = 2 * s as isize + 1;
        for p in (ci.floor() as isize - reach)..=(ci.ceil() as isize + reach) {
            for q in (cj.floor() as isize - reach)..=(cj.ceil() as isize + reach) {
                let wgt = weight(p as f64 - ci) * weight(q as f64 - cj);
                let pp = p.rem_euclid(h as isize) as usize;
                let qq = q.rem_euclid(w as isize) as usize;
                acc += wgt * x.get(t, pp, qq, c);
                norm += wgt;
            }
        }
        acc / norm
    };
    VideoTensor::from_fn([x.frames(), h / s, w / s], x.channels(), sample).unwrap()
}

#[test]
fn bicubic_degradation_matches_direct_resampler() {
    let smooth = VideoTensor::from_fn([2, 32, 32], 3, |t, h, w, c| {
        let a = 2.0 * std::f64::consts::PI / 32.0;
        0.5 + 0.2 * (a * h as f64 + t as f64).sin() * (a * 2.0 * w as f64 + c as f64).cos()
    })
    .unwrap();
    for s in [2usize, 3, 4] {
        let b = bicubic_kernel(s).unwrap();
        let spec = DegradationSpec::new(b.kernel.clone(), ScaleFactor::new(1, s, s).unwrap(), 0.0, 0).unwrap();
        if 32 % s != 0 {
            continue;
        }
        let ours = degrade(&smooth, &spec).unwrap();
        let reference = direct_bicubic_downscale(&smooth, s);
        let db = metrics::psnr(&ours, &reference, 1.0).unwrap();
        assert!(db >= 40.0, "s = {s}: {db} dB");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prop_round_trip(t in 1usize..5, h in 1usize..7, w in 1usize..9, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let x = common::random_video(&mut r, [t, h, w], 1);
        let s = fft3(&x, 0).unwrap();
        prop_assert!(s.hermitian_error() < 1e-10);
        let back = ifft3(&s).unwrap();
        prop_assert!(back.max_abs_diff(&x).unwrap() < 1e-10);
    }

    #[test]
    fn prop_zero_fill_adjoint(st in 1usize..3, sh in 1usize..4, sw in 1usize..4, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let s = ScaleFactor::new(st, sh, sw).unwrap();
        let lo = [2, 3, 2];
        let x = common::random_video(&mut r, s.upscale(lo), 3);
        let y = common::random_video(&mut r, lo, 3);
        let lhs = downsample_std(&x, s).unwrap().dot(&y).unwrap();
        let rhs = x.dot(&upsample_zero(&y, s)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn prop_fold_tile_adjoint(st in 1usize..3, sh in 1usize..3, sw in 1usize..4, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let s = ScaleFactor::new(st, sh, sw).unwrap();
        let lo = [2, 2, 3];
        let a = fft3(&common::random_video(&mut r, s.upscale(lo), 1), 0).unwrap();
        let b = fft3(&common::random_video(&mut r, lo, 1), 0).unwrap();
        let lhs = spectrum_fold_avg(&a, s).unwrap().inner(&b);
        let rhs = a.inner(&spectrum_tile(&b, s)) / s.product() as f64;
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn prop_shift_preserves_norm(dt in -5isize..5, dh in -5isize..5, dw in -5isize..5, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let x = common::random_video(&mut r, [3, 4, 5], 3);
        let shifted = x.circular_shift([dt, dh, dw]);
        prop_assert!((shifted.norm_sq() - x.norm_sq()).abs() < 1e-12);
        prop_assert_eq!(shifted.circular_shift([-dt, -dh, -dw]), x);
    }
}
