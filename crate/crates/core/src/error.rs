use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared name `{0}`")]
    Undeclared(String),
    #[error("arity mismatch for `{name}`: expected {expected}, found {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("reserved name `{0}` in user input")]
    Reserved(String),
    #[error("`{t}` is not substitutable for `{x}`")]
    NotSubstitutable { t: String, x: String },
    #[error("bad position {0:?}")]
    BadPath(Vec<usize>),
    #[error("freshness violation: {0}")]
    Freshness(String),
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("formula contains a quantifier; use the full hybrid translation")]
    QuantifierPresent,
    #[error("namespace violation: {0}")]
    Namespace(String),
    #[error("constructor outside language: {0}")]
    Language(String),
    #[error("unknown rule set `{0}`")]
    UnknownRuleSet(String),
    #[error("argument {arg} of `{op}` is not finitely bounded")]
    Unbounded { op: String, arg: usize },
    #[error("unsupported axiom: {0}")]
    UnsupportedAxiom(String),
    #[error("no absorption witness for {r1}/{r2} over `{op}`")]
    AbsorptionFailure { r1: String, r2: String, op: String },
    #[error("proof rejected: {0}")]
    Rejected(String),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
