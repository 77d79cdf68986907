use crate::C64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // series arithmetic
    #[error("series has a zero leading coefficient")]
    ZeroLeadingCoefficient,
    #[error("logarithm of a negative real leading coefficient needs an explicit branch")]
    BranchAmbiguity,
    #[error("exponential of a series with a pole part (valuation {0})")]
    PoleInExponential(i64),
    #[error("logarithm needs a series of valuation 0, got {0}")]
    NonUnitLogarithm(i64),
    #[error("series must have constant term 1")]
    NotUnipotent,

    // exponents
    #[error("exponents are identical")]
    IdenticalExponents,

    // difference modules
    #[error("input series is zero")]
    ZeroInput,
    #[error("ramified input (p = {0}) is not supported by raw classification")]
    RamifiedInput(u32),
    #[error("coboundary obstructed: coefficient of s^-{index}/{p} is {value}")]
    Obstructed { index: i64, p: u32, value: C64 },
    #[error("matrix is not invertible within truncation")]
    NonInvertible,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    // formal conjugation
    #[error("resonant order {0}: linear system is singular and inconsistent")]
    ResonantOrder(usize),
    #[error("F_0 = I is inconsistent with the order-0 equations")]
    NormalizationFailed,
    #[error("input series trusted through order {available}, need {needed}")]
    InsufficientOrder { needed: i64, available: i64 },
    #[error("grid point {0} lies outside the quadrant")]
    GridOutsideQuadrant(C64),
    #[error("exponential parts of A and B differ")]
    ExponentMismatch,

    // cocycles
    #[error("cocycle is not block unitriangular")]
    NotUnitriangular,
    #[error("exponents are not sorted for the requested parity")]
    UnsortedExponents,
    #[error("leading principal block minor {0} is singular within truncation")]
    SingularPrincipalMinor(usize),
    #[error("cocycle metadata does not match")]
    MetadataMismatch,
    #[error("block ({0},{1}) reaches its truncation order; raise the order")]
    TruncationTooLow(usize, usize),
    #[error("empty arc")]
    EmptyArc,

    // solution operators
    #[error("series diverges (terms non-decreasing up to term {0})")]
    Divergent(usize),
    #[error("maximum number of terms ({0}) exceeded")]
    MaxTermsExceeded(usize),
    #[error("integration path passes within {0:.3} of a kernel pole")]
    KernelPoleProximity(f64),
    #[error("ray truncation too low: integrand {0:e} at the cap")]
    RayTruncationTooLow(f64),
    #[error("adaptive quadrature failed to converge")]
    QuadratureFailure,
    #[error("no twist u^n with n <= {0} makes the integrand decay on the ray")]
    DecayProbeFailed(i64),
    #[error("evaluation failed at {0}")]
    EvaluationFailure(C64),

    // gamma
    #[error("Gamma has a pole at {0}")]
    PoleAt(i64),
    #[error("ill-conditioned fit (condition number {0:e})")]
    IllConditionedFit(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Numeric failures (divergence, resonance, quadrature) as opposed to
    /// precondition violations.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::ResonantOrder(_)
                | Error::Divergent(_)
                | Error::MaxTermsExceeded(_)
                | Error::RayTruncationTooLow(_)
                | Error::QuadratureFailure
                | Error::DecayProbeFailed(_)
                | Error::IllConditionedFit(_)
                | Error::EvaluationFailure(_)
                | Error::NonInvertible
                | Error::SingularPrincipalMinor(_)
        )
    }
}
