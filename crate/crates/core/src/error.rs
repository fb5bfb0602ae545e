use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// Variants are grouped loosely by subsystem; everything is `Clone` so
/// reports can carry the error that produced them.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("unsupported dimension n = {0}; only n = 5 and n = 6 are handled")]
    UnsupportedDimension(usize),

    #[error("green function is singular: the two points coincide")]
    CoincidentPoints,

    #[error("point lies at the chart antipode; stereographic projection undefined")]
    ChartDomain,

    #[error("degenerate frame: the two centers coincide")]
    DegenerateFrame,

    #[error("integrand returned a non-finite sample at {context}")]
    IntegrationFailure { context: String },

    #[error("monte-carlo sample count {0} is below the minimum 1000")]
    TooFewSamples(usize),

    #[error("direction is not a unit tangent vector at the bubble center")]
    NotTangent,

    #[error("curvature field must be strictly positive; found K = {value:.6e} at a grid point")]
    NonPositiveCurvature { value: f64 },

    #[error("curvature file is malformed: {0}")]
    CurvatureFormat(String),

    #[error("constant calibration failed: residual {residual:.3e} exceeds 5%")]
    Calibration { residual: f64 },

    #[error("Morse hypothesis violated at point {location:?}: {reason}")]
    MorseViolation { location: Vec<f64>, reason: String },

    #[error("critical point search is inconsistent with the Euler characteristic: index sum {sum}, expected {expected}")]
    EulerMismatch { sum: i64, expected: i64 },

    #[error("flow line failed to converge after {steps} steps (|grad| = {grad_norm:.3e})")]
    FlowNonConvergence { steps: usize, grad_norm: f64 },

    #[error("interaction tuple contains repeated indices")]
    RepeatedIndices,

    #[error("matrix M({tuple:?}) is boundary-degenerate: |rho| = {rho:.3e} < 1e-9")]
    BoundaryDegenerate { tuple: Vec<usize>, rho: f64 },

    #[error("critical values at infinity are tied between points {0} and {1}")]
    TiedCriticalValues(usize, usize),

    #[error("theorem {theorem} requires n = {expected}, got n = {got}")]
    WrongDimension {
        theorem: String,
        expected: usize,
        got: usize,
    },

    #[error("state is outside the expansion regime: {0}")]
    OutOfRegime(String),

    #[error("state could not be classified: {0}")]
    Unclassifiable(String),

    #[error("eigensolver did not converge")]
    EigenFailure,
}

pub type Result<T> = std::result::Result<T, Error>;
