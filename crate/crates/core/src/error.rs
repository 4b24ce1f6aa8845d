use alloc::string::String;

/// Failure modes of the numeric core.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("channel {channel} out of range for a {channels}-channel video")]
    ChannelOutOfRange { channel: usize, channels: usize },

    #[error("invalid video shape {shape:?} with {channels} channels")]
    InvalidShape { shape: [usize; 3], channels: usize },

    #[error("expected {expected} samples, found {found}")]
    SampleCount { expected: usize, found: usize },

    #[error("non-finite sample encountered in {0}")]
    NonFinite(&'static str),

    /// The inverse transform of a spectrum that should be Hermitian had a
    /// large imaginary part.
    #[error("inverse FFT imaginary residue {0:e} exceeds tolerance")]
    ImaginaryResidue(f64),

    #[error("kernel extent {kernel:?} exceeds video extent {shape:?}")]
    KernelTooLarge { kernel: [usize; 3], shape: [usize; 3] },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("shape {shape:?} is not divisible by scale factor {scale:?}")]
    NotDivisible { shape: [usize; 3], scale: [usize; 3] },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch { expected: [usize; 4], found: [usize; 4] },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dense oracle limited to {limit} unknowns, got {size}")]
    OracleTooLarge { size: usize, limit: usize },

    #[error("normal equations are not positive definite")]
    SingularSystem,

    #[error("frame {height}x{width} smaller than the {window}x{window} SSIM window")]
    FrameTooSmall { height: usize, width: usize, window: usize },

    #[error("non-finite intermediate at iteration {iteration}")]
    Diverged { iteration: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
