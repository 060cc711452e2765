use thiserror::Error;

/// Errors raised by the kernel. Variant names double as the `kind` string in
/// structured JSON error reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("unsupported tower: {0}")]
    UnsupportedTower(String),
    #[error("division by an element indistinguishable from zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("Newton condition failed: v(f(a)) = {fa}, v(f'(a)) = {dfa}")]
    NewtonConditionFailed { fa: String, dfa: String },
    #[error("no convergence within the precision budget")]
    NonConvergence,
    #[error("target field too small: found {found} of {needed}")]
    InsufficientTarget { found: usize, needed: usize },
    #[error("argument outside the domain: {0}")]
    OutsideDomain(String),
    #[error("elements or objects live over different fields")]
    FieldMismatch,
    #[error("degree overflow: {0}")]
    DegreeOverflow(String),
    #[error("truncation mismatch: {0}")]
    TruncationMismatch(String),
    #[error("rank deficiency: {0}")]
    RankDeficiency(String),
    #[error("character is not a member of the given condition")]
    NotAMember,
    #[error("field does not contain the primitive {0}-th roots of unity")]
    MissingRootsOfUnity(u64),
    #[error("pullback does not map W1 into W2")]
    ConditionNotMapped,
    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),
    #[error("convergence budget violated: {0}")]
    ConvergenceBudget(String),
    #[error("invalid Frobenius series: {0}")]
    InvalidFrobenius(String),
    #[error("recursion obstruction at degree {0}")]
    RecursionObstruction(usize),
    #[error("element is not integral")]
    NotIntegral,
    #[error("series is zero")]
    ZeroSeries,
    #[error("degree budget: need degree {needed}, have {have}")]
    DegreeBudget { needed: usize, have: usize },
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("element is not in Z_p: {0}")]
    NotZpRational(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidPolynomial(_) => "InvalidPolynomial",
            Error::UnsupportedTower(_) => "UnsupportedTower",
            Error::DivisionByZero => "DivisionByZero",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::NewtonConditionFailed { .. } => "NewtonConditionFailed",
            Error::NonConvergence => "NonConvergence",
            Error::InsufficientTarget { .. } => "InsufficientTarget",
            Error::OutsideDomain(_) => "OutsideDomain",
            Error::FieldMismatch => "FieldMismatch",
            Error::DegreeOverflow(_) => "DegreeOverflow",
            Error::TruncationMismatch(_) => "TruncationMismatch",
            Error::RankDeficiency(_) => "RankDeficiency",
            Error::NotAMember => "NotAMember",
            Error::MissingRootsOfUnity(_) => "MissingRootsOfUnity",
            Error::ConditionNotMapped => "ConditionNotMapped",
            Error::TruncationInsufficient(_) => "TruncationInsufficient",
            Error::ConvergenceBudget(_) => "ConvergenceBudget",
            Error::InvalidFrobenius(_) => "InvalidFrobenius",
            Error::RecursionObstruction(_) => "RecursionObstruction",
            Error::NotIntegral => "NotIntegral",
            Error::ZeroSeries => "ZeroSeries",
            Error::DegreeBudget { .. } => "DegreeBudget",
            Error::UnknownSuite(_) => "UnknownSuite",
            Error::NotZpRational(_) => "NotZpRational",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Module that owns the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidPolynomial(_)
            | Error::UnsupportedTower(_)
            | Error::DivisionByZero
            | Error::PrecisionExhausted(_)
            | Error::NewtonConditionFailed { .. }
            | Error::NonConvergence
            | Error::InsufficientTarget { .. }
            | Error::OutsideDomain(_)
            | Error::FieldMismatch
            | Error::NotZpRational(_) => "padic-core",
            Error::DegreeOverflow(_) | Error::TruncationMismatch(_) => "amice",
            Error::RankDeficiency(_)
            | Error::NotAMember
            | Error::MissingRootsOfUnity(_)
            | Error::ConditionNotMapped
            | Error::TruncationInsufficient(_)
            | Error::ConvergenceBudget(_) => "charvar",
            Error::InvalidFrobenius(_)
            | Error::RecursionObstruction(_)
            | Error::NotIntegral
            | Error::ZeroSeries
            | Error::DegreeBudget { .. } => "lubin-tate",
            Error::UnknownSuite(_) | Error::InvalidInput(_) => "cli",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
