use collar_glue::GlueError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed scenario, unknown name, or parameters out of range.
    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Glue(GlueError),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<GlueError> for CliError {
    /// Errors that describe the inputs rather than the numerics are input errors.
    fn from(e: GlueError) -> Self {
        let kind = match e {
            GlueError::BandTooWide { .. } => "BandTooWide",
            GlueError::CollarTooShallow { .. } => "CollarTooShallow",
            GlueError::DimensionMismatch(_) => "DimensionMismatch",
            GlueError::InvalidInput(_) => "InvalidInput",
            other => return CliError::Glue(other),
        };
        CliError::Input(format!("{kind}: {e}"))
    }
}

impl CliError {
    pub fn is_input(&self) -> bool {
        matches!(self, CliError::Input(_))
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
