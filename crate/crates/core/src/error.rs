use thiserror::Error;

use crate::module::horizontal::HorizontalBasis;

/// Errors raised by the library. Verdict-valued operations report
/// mathematical outcomes in their return type instead.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("DivisionByZero: divisor is indistinguishable from zero")]
    DivisionByZero,
    #[error("PrecisionExhausted: {0}")]
    PrecisionExhausted(String),
    #[error("PrimeMismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("AmbiguousValuation: valuation at index {0} is not determined at working precision")]
    AmbiguousValuation(i64),
    #[error("NumericalFailure: {0}")]
    NumericalFailure(String),
    #[error("WindowOverflow: width {width} exceeds maximum {max}")]
    WindowOverflow { width: usize, max: usize },
    #[error("NotAUnit: series has no provably nonzero coefficient")]
    NotAUnit,
    #[error("SingularInput: {0}")]
    SingularInput(String),
    #[error("SingularFrobenius: Frobenius matrix is not invertible at working precision")]
    SingularFrobenius,
    #[error("MembershipViolated: entry ({row},{col}) exponent {exponent} contradicts {label}")]
    MembershipViolated { row: usize, col: usize, exponent: i64, label: String },
    #[error("NotConverged: no fixed point after {0} iterations")]
    NotConverged(usize),
    #[error("NotFactorable: valuation of det is {det_valuation}, lattice index is {lattice_index}")]
    NotFactorable { det_valuation: i64, lattice_index: i64 },
    #[error("NonUnitPivot: column {0} has no invertible pivot")]
    NonUnitPivot(usize),
    #[error("NotHorizontal: column {column} has connection residual of valuation {valuation}")]
    NotHorizontal { column: usize, valuation: i64 },
    #[error("NotFrobeniusStable: column {column} leaves the span under Frobenius")]
    NotFrobeniusStable { column: usize },
    #[error("HorizontalExhausted: precision exhausted after degree {achieved_degree}")]
    HorizontalExhausted { achieved_degree: usize, partial: Box<HorizontalBasis> },
    #[error("PreconditionFailed: {0}")]
    PreconditionFailed(Precondition),
    #[error("CocycleViolated: g={g}, h={h}")]
    CocycleViolated { g: usize, h: usize },
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
    #[error("ParseError: {0}")]
    Parse(String),
}

impl Error {
    /// Short variant name, used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::PrimeMismatch(..) => "PrimeMismatch",
            Error::AmbiguousValuation(_) => "AmbiguousValuation",
            Error::NumericalFailure(_) => "NumericalFailure",
            Error::WindowOverflow { .. } => "WindowOverflow",
            Error::NotAUnit => "NotAUnit",
            Error::SingularInput(_) => "SingularInput",
            Error::SingularFrobenius => "SingularFrobenius",
            Error::MembershipViolated { .. } => "MembershipViolated",
            Error::NotConverged(_) => "NotConverged",
            Error::NotFactorable { .. } => "NotFactorable",
            Error::NonUnitPivot(_) => "NonUnitPivot",
            Error::NotHorizontal { .. } => "NotHorizontal",
            Error::NotFrobeniusStable { .. } => "NotFrobeniusStable",
            Error::HorizontalExhausted { .. } => "PrecisionExhausted",
            Error::PreconditionFailed(_) => "PreconditionFailed",
            Error::CocycleViolated { .. } => "CocycleViolated",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Parse(_) => "ParseError",
        }
    }

    /// True for errors that describe a mathematical outcome rather than bad input.
    pub fn is_mathematical(&self) -> bool {
        !matches!(
            self,
            Error::Parse(_) | Error::InvalidInput(_) | Error::DimensionMismatch(_) | Error::PrimeMismatch(..)
        )
    }
}

/// Hypotheses of projector averaging, named so a failure says which one broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precondition {
    NotIdempotent,
    NotCommutingWithIterate,
    ImageNotStable,
}

impl std::fmt::Display for Precondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Precondition::NotIdempotent => "projector is not idempotent",
            Precondition::NotCommutingWithIterate => "projector does not commute with the iterated Frobenius",
            Precondition::ImageNotStable => "image is not Frobenius-stable",
        };
        f.write_str(s)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
