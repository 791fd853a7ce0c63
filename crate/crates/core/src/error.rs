use thiserror::Error;

/// Binding a parsed query or pattern against a log schema failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("unknown event attribute `{0}`")]
    UnknownAttribute(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("unknown source `{found}`, expected `{expected}`")]
    UnknownSource { expected: String, found: String },
    #[error("behaviour `{0}` is not defined")]
    UnboundBehaviourName(String),
    #[error("identifier {0} does not fit the pattern kind")]
    MixedIdentifiers(String),
    #[error("cannot compare {left} with {right}")]
    TypeMismatch { left: String, right: String },
    #[error("condition is not a pattern match")]
    NotAPattern,
}
