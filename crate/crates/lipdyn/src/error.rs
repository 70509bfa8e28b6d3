use std::path::{Path, PathBuf};

use lipdyn_core::error::Error as CoreError;

/// Everything the command line can fail with, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{message}")]
    Config { path: Option<PathBuf>, message: String },
    #[error("{source}")]
    Core {
        path: Option<PathBuf>,
        #[source]
        source: CoreError,
    },
    #[error("{source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{reason}")]
    Format { path: PathBuf, reason: String },
}

pub type Result<T> = std::result::Result<T, CliError>;

impl From<CoreError> for CliError {
    fn from(source: CoreError) -> Self {
        CliError::Core { path: None, source }
    }
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, reason: impl Into<String>) -> Self {
        CliError::Format {
            path: path.to_path_buf(),
            reason: reason.into(),
        }
    }

    /// Attaches a file to a core error that lacks one.
    pub fn at(self, p: &Path) -> Self {
        match self {
            CliError::Core { path: None, source } => CliError::Core {
                path: Some(p.to_path_buf()),
                source,
            },
            other => other,
        }
    }

    /// 1 usage, 2 data, 3 numeric failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 1,
            CliError::Core { source, .. } => match source {
                CoreError::InvalidConfig(_) => 1,
                CoreError::NonFiniteLoss { .. } | CoreError::NotNormalized { .. } | CoreError::PcaInput(_) => 3,
                _ => 2,
            },
            CliError::Io { .. } | CliError::Format { .. } => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config { .. } => "config",
            CliError::Io { .. } => "io",
            CliError::Format { .. } => "format",
            CliError::Core { source, .. } => match source {
                CoreError::MalformedRecord { .. } => "malformed_record",
                CoreError::DegenerateBox => "degenerate_box",
                CoreError::DegenerateGeometry(_) => "degenerate_geometry",
                CoreError::EmptyMask => "empty_mask",
                CoreError::TooFewPixels => "too_few_pixels",
                CoreError::NotNormalized { .. } => "not_normalized",
                CoreError::PcaInput(_) => "pca_input",
                CoreError::WindowTooShort { .. } => "window_too_short",
                CoreError::UnknownPhoneme(_) => "unknown_phoneme",
                CoreError::DimensionMismatch { .. } => "dimension_mismatch",
                CoreError::NoPositivePairs => "no_positive_pairs",
                CoreError::NoNegativePairs => "no_negative_pairs",
                CoreError::NonFiniteLoss { .. } => "non_finite_loss",
                CoreError::TooFewWindows { .. } => "too_few_windows",
                CoreError::EmptySet => "empty_set",
                CoreError::VersionMismatch { .. } => "version_mismatch",
                CoreError::EmptyInput => "empty_input",
                CoreError::InsufficientData { .. } => "insufficient_data",
                CoreError::MissingBlock => "missing_block",
                CoreError::InvalidConfig(_) => "invalid_config",
            },
        }
    }

    /// One line: `error code=<n> kind=<kind> [path=".."] [line=<n>] message=".."`.
    pub fn diagnostic(&self) -> String {
        let quote = |s: &str| serde_json::to_string(s).expect("strings serialize");
        let mut out = format!("error code={} kind={}", self.exit_code(), self.kind());
        let path = match self {
            CliError::Io { path, .. } | CliError::Format { path, .. } => Some(path.as_path()),
            CliError::Core { path, .. } | CliError::Config { path, .. } => path.as_deref(),
            CliError::Usage(_) => None,
        };
        if let Some(p) = path {
            out.push_str(&format!(" path={}", quote(&p.display().to_string())));
        }
        let message = match self {
            CliError::Core {
                source: CoreError::MalformedRecord { line, reason },
                ..
            } => {
                out.push_str(&format!(" line={line}"));
                reason.clone()
            }
            other => other.to_string(),
        };
        out.push_str(&format!(" message={}", quote(&message)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnostics_are_single_lines() {
        let e = CliError::from(CoreError::MalformedRecord {
            line: 3,
            reason: "bad\nthing".into(),
        })
        .at(Path::new("a.lmk.jsonl"));
        let d = e.diagnostic();
        assert_eq!(d, r#"error code=2 kind=malformed_record path="a.lmk.jsonl" line=3 message="bad\nthing""#);
        assert!(!d.contains('\n'));
        let e = CliError::from(CoreError::NonFiniteLoss {
            epoch: 1,
            batch: 2,
            last_loss: 0.5,
        });
        assert_eq!(e.exit_code(), 3);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
    }
}
