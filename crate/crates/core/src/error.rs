use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("coin state is not normalized (norm {norm:.12})")]
    NotNormalized { norm: f64 },

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("unknown protocol family `{0}`")]
    UnknownFamily(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("site range too small: need half-width {required}, have {available}")]
    InsufficientSiteRange { required: usize, available: usize },

    #[error("grid too coarse: {samples} samples cannot hold {required} occupied sites")]
    GridTooCoarse { samples: usize, required: usize },

    #[error(
        "no continuous branch at sample {sample}: smallest jump {jump:.4} rad exceeds bound {bound:.4} rad"
    )]
    BranchSelection {
        sample: usize,
        jump: f64,
        bound: f64,
    },

    #[error("reconstruction error {error:.3e} at sample {sample} exceeds {tolerance:.1e}")]
    Reconstruction {
        sample: usize,
        error: f64,
        tolerance: f64,
    },

    #[error("cannot split {tau} steps into {stages} stages")]
    StageSplit { tau: usize, stages: usize },

    #[error("invalid optical setup: {0}")]
    Optics(String),

    #[error("mode {mode} aliases: far-field grid covers only |m| <= {limit}")]
    Aliasing { mode: i64, limit: i64 },

    #[error("spot for site {site} overlaps the image boundary")]
    SpotOutOfBounds { site: i64 },

    #[error("image has zero total intensity")]
    ZeroIntensity,

    #[error("invalid measurement: {0}")]
    Measurement(String),

    #[error("unphysical Stokes vector (norm {norm:.9})")]
    UnphysicalStokes { norm: f64 },

    #[error("pattern file line {line}: {message}")]
    PatternFormat { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
