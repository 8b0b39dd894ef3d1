use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    AlgebraSyntax { line: usize, msg: String },

    #[error("unknown operation `{0}`")]
    UnknownOp(String),

    #[error("operation `{op}` has arity {expected}, got {got} arguments")]
    ArityMismatch { op: String, expected: usize, got: usize },

    #[error("element {value} out of range for universe of size {size}")]
    OutOfRange { value: usize, size: usize },

    #[error("relations over universes of size {left} and {right} cannot be combined")]
    SizeMismatch { left: usize, right: usize },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("relation is not a {0}")]
    KindViolation(String),

    #[error("{what} cap exceeded (reached {reached}, cap {cap})")]
    CapExceeded {
        what: &'static str,
        reached: usize,
        cap: usize,
    },

    #[error("unbound variable x{0}")]
    UnboundVariable(usize),

    #[error("term syntax error at byte {pos}: {msg}")]
    TermSyntax { pos: usize, msg: String },

    #[error("identity syntax error at byte {pos}: {msg}")]
    IdentitySyntax { pos: usize, msg: String },

    #[error("undeclared variable `{0}`")]
    Undeclared(String),

    #[error("left-hand side outside the generic grammar: {0}")]
    NotGeneric(String),

    #[error("symbolic count `k` has no value")]
    UnresolvedCount,

    #[error("malformed chain: {0}")]
    MalformedChain(String),

    #[error("chain does not satisfy its scheme: {0}")]
    InvalidChain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parameter constraint violated: {0}")]
    Constraint(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownIdentity(String),

    #[error("unknown bound formula `{0}`")]
    UnknownBound(String),
}

impl Error {
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
