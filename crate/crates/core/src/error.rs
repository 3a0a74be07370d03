use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("rate assignment: {0}")]
    Rates(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("undefined for zero polynomial")]
    ZeroPolynomial,

    #[error("polynomial is not squarefree on (0, inf); divide by gcd(p, p') first")]
    NotSquarefree,

    #[error("graph is not weakly reversible")]
    NotWeaklyReversible,

    #[error("detailed balance requires a reversible graph")]
    NotReversible,

    #[error("state must be strictly positive")]
    NonPositiveState,

    #[error("exact rates required: {0}")]
    ExactRequired(String),

    #[error("not a line network: {0}")]
    NotLineNetwork(String),

    #[error("pattern is not single-sign-change")]
    NotSingleSignChange,

    #[error("parametrization is not mass-action faithful: {0}")]
    NotFaithful(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("network file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
