use alloc::string::String;

/// Every failure the feature pipeline and verifier can report.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("mouth bounding box has zero area")]
    DegenerateBox,
    #[error("degenerate lip geometry: {0}")]
    DegenerateGeometry(&'static str),
    #[error("lip mask is empty")]
    EmptyMask,
    #[error("region has fewer than 2 valid pixel pairs")]
    TooFewPixels,
    #[error("co-occurrence matrix sums to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("not enough training vectors for PCA: {0}")]
    PcaInput(usize),
    #[error("window has {frames} frames, need at least {needed}")]
    WindowTooShort { frames: usize, needed: usize },
    #[error("unknown phoneme {0:?}")]
    UnknownPhoneme(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training pairs contain no same-subject pair")]
    NoPositivePairs,
    #[error("training pairs contain no different-subject pair")]
    NoNegativePairs,
    #[error("loss became non-finite at epoch {epoch}, batch {batch} (last finite loss {last_loss})")]
    NonFiniteLoss {
        epoch: usize,
        batch: usize,
        last_loss: f64,
    },
    #[error("enrollment needs at least {needed} windows, got {got}")]
    TooFewWindows { got: usize, needed: usize },
    #[error("empty score set")]
    EmptySet,
    #[error("template model version {template:016x} does not match model {model:016x}")]
    VersionMismatch { template: u64, model: u64 },
    #[error("empty input")]
    EmptyInput,
    #[error("subject {subject:?} has {have} windows, need {need}")]
    InsufficientData {
        subject: String,
        have: usize,
        need: usize,
    },
    #[error("window lacks the static or articulator block")]
    MissingBlock,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = core::result::Result<T, Error>;
