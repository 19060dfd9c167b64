use thiserror::Error;

/// Crate-wide error type. Failed *checks* (an axiom that does not hold, a
/// realization that does not verify) are ordinary return values, not errors;
/// `Error` is reserved for malformed input and precondition violations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("shape mismatch in {ctx}: expected {expected}, got {got}")]
    ShapeMismatch {
        ctx: &'static str,
        expected: String,
        got: String,
    },

    #[error("color mismatch: expected {expected}, got {got}")]
    ColorMismatch { expected: String, got: String },

    #[error("unknown color {0:?}")]
    UnknownColor(String),

    #[error("arity {requested} exceeds cap {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("generators violate the Coxeter presentation: {relation}")]
    CoxeterViolation { relation: String },

    #[error("stored data is not equivariant: {0}")]
    EquivarianceViolation(String),

    #[error("matrix group enumeration exceeded {bound} elements")]
    GroupTooLarge { bound: usize },

    #[error("operad has a nonzero component above arity {degree} (arity {arity})")]
    NotNilpotent { degree: usize, arity: usize },

    #[error("missing structure data for {0}")]
    MissingComponent(String),

    #[error("{path}: {msg}")]
    BadDocument { path: String, msg: String },

    #[error("invalid input: {0}")]
    BadInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn bad_input(msg: impl Into<String>) -> Self {
        Error::BadInput(msg.into())
    }

    pub fn doc(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::BadDocument {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
