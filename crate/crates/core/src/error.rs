use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("algebra needs at least one matrix factor")]
    EmptyFactorList,
    #[error("trace is not normalized: sum of w_i * n_i = {sum}")]
    NonNormalizedTrace { sum: f64 },
    #[error("invalid factor: {0}")]
    InvalidFactor(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("operator is not a projection (idempotence/self-adjointness defect {defect:e})")]
    NotAProjection { defect: f64 },
    #[error("operator is not self-adjoint (defect {defect:e})")]
    NotSelfAdjoint { defect: f64 },
    #[error("operator is not positive (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },
    #[error("operator is singular")]
    Singular,
    #[error("operator is not invertible")]
    NotInvertible,
    #[error("tau-dimensions differ: {0}")]
    DimensionMismatch(String),
    #[error("path does not start at the identity (defect {defect:e})")]
    PathNotAtIdentity { defect: f64 },
    #[error("path sample {0} is singular")]
    SingularSample(usize),
    #[error("invalid path sampling: {0}")]
    InvalidPath(String),
    #[error("iteration did not converge: {0}")]
    NotConverged(String),
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("generator {0} is singular")]
    SingularGenerator(usize),
    #[error("malformed relator word: {0}")]
    MalformedWord(String),
    #[error("holonomies have {left} and {right} generators")]
    GeneratorCountMismatch { left: usize, right: usize },
    #[error("holonomy is not consistent with its relators")]
    InconsistentHolonomy,
    #[error("degree {degree} out of range 0..={top}")]
    DegreeOutOfRange { degree: usize, top: usize },
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("invalid metric family: {0}")]
    InvalidMetric(String),
    #[error("harmonic dimension in degree {degree} jumps from {from} to {to} along the family")]
    BettiJump { degree: usize, from: f64, to: f64 },
    #[error("metric family provides no derivative")]
    MissingDerivative,
    #[error("finite-difference step {step:e} too large (truncation estimate {estimate:e})")]
    StepTooLarge { step: f64, estimate: f64 },
    #[error("time parameter must be positive")]
    NonpositiveTime,
    #[error("shifted spectrum has a nonpositive point")]
    ShiftedSpectrumNonpositive,
    #[error("torsion element has zero coefficient")]
    ZeroTorsion,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("quadrature did not converge (estimated error {est_error:e})")]
    QuadratureNotConverged { est_error: f64 },
    #[error("form matrix is not antisymmetric")]
    NotAntisymmetric,
    #[error("form entries must have no degree-0 part")]
    NotNilpotent,
    #[error("invalid form data: {0}")]
    InvalidForm(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Whether the failure is a numerical non-convergence rather than bad input.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, Error::NotConverged(_) | Error::QuadratureNotConverged { .. })
    }
}
