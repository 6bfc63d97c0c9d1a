use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Fricke equation a^2 + b^2 + c^2 = abc violated (residual {residual})")]
    EquationViolated { residual: String },
    #[error("parameters must satisfy 2 < a <= b <= c < ab/2: {0}")]
    OrderingViolated(String),
    #[error("no real root: discriminant a^2 b^2 - 4a^2 - 4b^2 is negative")]
    NoRealRoot,
    #[error("the move nu is only defined on the edge joining the two roots")]
    NuNotAtRoot,
    #[error("budget admits no nodes")]
    BudgetZero,
    #[error("budget has no finite bound")]
    UnboundedBudget,
    #[error("circle passes through the pole of the transformation")]
    PoleOnCircle,
    #[error("lower-left entry is zero")]
    GammaZero,
    #[error("matrix is not an order-two elliptic element (trace 0, determinant 1)")]
    NotOrderTwo,
    #[error("element is not hyperbolic (|trace| = {trace})")]
    NotHyperbolic { trace: String },
    #[error("axis is vertical (a fixed point at infinity)")]
    VerticalAxis,
    #[error("points coincide")]
    SamePoint,
    #[error("points are vertically aligned; the joining h-line is vertical")]
    VerticalLine,
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("excision intervals overlap: {0}")]
    OverlapDetected(String),
    #[error("need at least two distinct positive scales")]
    DegenerateScales,
    #[error("growth bound violated at {path}: {detail}")]
    BoundViolated { path: String, detail: String },
    #[error("exponent range exhausted after {steps} steps; shorten the branch")]
    PrecisionExhausted { steps: usize },
    #[error("scene window is empty")]
    EmptyScene,
    #[error("{0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
