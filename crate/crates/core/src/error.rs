use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the transform, denoising and I/O layers.
#[derive(Debug, Error)]
pub enum DatError {
    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("signal too short: length {len}, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("frame length {0} is not a power of two >= 4")]
    NotPowerOfTwo(usize),

    #[error("invalid sample rate {0} Hz")]
    InvalidSampleRate(f64),

    #[error("invalid frequency {0} Hz")]
    InvalidFrequency(f64),

    #[error("non-finite Bark value")]
    NonFiniteBark,

    #[error("degenerate spreading function: column norm vanishes at bin {bin}")]
    DegenerateSpreading { bin: usize },

    #[error("band index {band} out of range (bands: {bands})")]
    BandOutOfRange { band: usize, bands: usize },

    #[error("coefficient dimensions {found_frames}x{found_bands} do not match kernel {frames}x{bands}")]
    DimensionMismatch {
        frames: usize,
        bands: usize,
        found_frames: usize,
        found_bands: usize,
    },

    #[error("clean reference signal is identically zero")]
    ZeroSignal,

    #[error("threshold scale must be finite and non-negative, got {0}")]
    InvalidAlpha(f64),

    #[error("invalid frame plan: {0}")]
    InvalidFramePlan(String),

    #[error("SNR grid is empty")]
    EmptyGrid,

    #[error("malformed WAV header in {path}: {reason}")]
    WavHeader { path: PathBuf, reason: String },

    #[error("unsupported WAV encoding in {path}: {reason}")]
    WavUnsupported { path: PathBuf, reason: String },

    #[error("WAV file {path} has no samples")]
    WavEmpty { path: PathBuf },

    #[error("WAV file {path} has {channels} channels; pass the down-mix flag to average them")]
    WavMultichannel { path: PathBuf, channels: u16 },

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = DatError> = std::result::Result<T, E>;

impl DatError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DatError::Io {
            path: path.into(),
            source,
        }
    }
}
