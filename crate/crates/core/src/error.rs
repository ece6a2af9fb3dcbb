use alloc::string::String;

/// Errors raised by the exact routines in this crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("cannot parse {0:?} as an exact rational")]
    ParseRational(String),
    #[error("p must lie strictly between 0 and 1, got {0}")]
    ProbabilityOutOfRange(String),
    #[error("n must be at least 1")]
    NoTrials,
    #[error("k exceeds n (k = {k}, n = {n})")]
    KExceedsN { k: u64, n: u64 },
    #[error("k must be at least {min}, got {k}")]
    KTooSmall { k: u64, min: u64 },
    #[error("k must be even, got {0}")]
    OddK(u64),
    #[error("k must be odd, got {0}")]
    EvenK(u64),
    #[error("{pairs} disjoint root pairs do not fit in 0..={limit}")]
    PairsDoNotFit { pairs: u64, limit: u64 },
    #[error("root pairs starting at {0} and {1} overlap")]
    OverlappingPairs(u64, u64),
    #[error("root pair start {start} exceeds {limit}")]
    PairOutOfRange { start: u64, limit: u64 },
    #[error("point {x} lies outside 0..={n}")]
    OutOfRange { x: i64, n: u64 },
    #[error("support points must be distinct and increasing")]
    RepeatedSupport,
    #[error("expected {expected} support points, got {got}")]
    SupportSize { expected: usize, got: usize },
    #[error("masses must be positive and sum to 1")]
    InvalidMasses,
    #[error("degree {d} needs at most {limit} for {m} mass points")]
    DegreeTooLarge { d: u64, m: u64, limit: u64 },
    #[error("candidate count {count} exceeds budget {budget}")]
    BudgetExceeded { count: String, budget: u64 },
    #[error("polynomial vanishes at {0}")]
    ZeroPoint(i64),
    #[error("no admissible witness in the search window")]
    NoWitness,
    #[error("malformed linear program: {0}")]
    MalformedLp(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("internal disagreement: {0}")]
    Disagreement(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
