use thiserror::Error;

use crate::ir::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("{what} width {width} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        width: usize,
        cap: usize,
    },

    #[error("bit list of length {0} overflows the basis index")]
    IndexOverflow(usize),

    #[error("basis index {index} out of range for width {width}")]
    IndexOutOfRange { index: usize, width: usize },

    #[error("invalid circuit: {}", format_violations(.0))]
    InvalidCircuit(Vec<Violation>),

    #[error("invalid classical stage: {0}")]
    InvalidStage(String),

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("operator is not an involution (deviation {deviation:.3e})")]
    NotInvolution { deviation: f64 },

    #[error("Kraus operators violate completeness (deviation {deviation:.3e})")]
    Completeness { deviation: f64 },

    #[error("classically controlled gate at {0} needs branch expansion; use the hybrid path")]
    UnresolvedClassicalControl(usize),

    #[error("operation at gate {index} is not supported here: {reason}")]
    Unsupported { index: usize, reason: String },

    #[error("factorization rejected: {0}")]
    FactorizationMismatch(String),

    #[error("invalid cut location: {0}")]
    InvalidLocation(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("shot count must be positive")]
    ZeroShots,

    #[error("programs are not comparable: {0}")]
    Incomparable(String),

    #[error("unknown gate kind `{kind}` at {context}")]
    UnknownGateKind { kind: String, context: String },

    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}
