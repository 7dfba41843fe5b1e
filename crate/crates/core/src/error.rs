use crate::eval::SchemaError;
use crate::imports::ImportError;
use crate::syntax::ParseError;

/// Failures that stop a module from being evaluated at all. Problems with
/// the configured values themselves are reported as
/// [`Violation`](crate::eval::Violation)s instead.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Import(#[from] ImportError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("bundled asset `{0}` does not match its recorded checksum")]
    AssetIntegrity(String),
    #[error("no instance named `{0}` in the entry module")]
    UnknownInstance(String),
    #[error("invalid tool version `{0}`")]
    ToolVersion(String),
}

impl Error {
    pub fn span(&self) -> Option<&crate::span::SourceSpan> {
        match self {
            Error::Parse(e) => Some(e.span()),
            Error::Import(e) => e.span(),
            Error::Schema(e) => Some(e.span()),
            _ => None,
        }
    }
}
