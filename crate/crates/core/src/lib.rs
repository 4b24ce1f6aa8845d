//! Model-based space-time video super-resolution.
//!
//! A high-resolution video `X` is observed as `Y = (X conv K) dec s + N`: a
//! circular 3-D blur, phase-0 decimation by `s = (s_t, s_h, s_w)` and white
//! Gaussian noise. [`hqs::restore`] inverts this by half-quadratic splitting,
//! alternating the exact FFT-domain data solve in [`fdt`] with a denoiser from
//! [`priors`]. [`oracle`] holds a dense linear-algebra reference for the data
//! solve.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;

pub mod degradation;
pub mod error;
pub mod fdt;
pub mod fft;
pub mod hqs;
pub mod interp;
pub mod kernel;
pub mod metrics;
pub mod oracle;
pub mod priors;
pub mod spectrum;
pub mod synthetic;
pub mod tensor;

pub use degradation::{
    bicubic_kernel, conv3_circular, degrade, downsample_std, exposure_box_kernel, gaussian_spatial_kernel,
    BicubicKernel, DegradationSpec,
};
pub use error::{Error, Result};
pub use fdt::{fdt_solve, spectrum_fold_avg, spectrum_tile, upsample_zero, FdtContext};
pub use hqs::{build_schedule, restore, HqsConfig, HqsSchedule, RestoreTrace, TraceStep};
pub use interp::{init_x0, InitMode};
pub use kernel::Kernel3D;
pub use metrics::{charbonnier, psnr, ssim, ColorSpace, MetricReport};
pub use oracle::dense_oracle_solve;
pub use priors::{denoise, tv_objective, DenoiserSpec};
pub use spectrum::{fft3, ifft3, kernel_to_otf, ComplexSpectrum};
pub use tensor::{Extent, ScaleFactor, VideoTensor};
