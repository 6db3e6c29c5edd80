use thiserror::Error;

/// Errors raised by the numerical kernels and model builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("eigen-solver did not converge")]
    NonConvergence,
    #[error("eigenvector matrix is ill-conditioned (cond = {cond:.3e})")]
    NonDiagonalizable { cond: f64 },
    #[error("polynomial has no nonzero coefficient of positive degree")]
    DegenerateLeadingCoefficient,
    #[error("Sylvester pencil is singular (min |a_i + b_j| = {gap:.3e})")]
    SingularPencil { gap: f64 },
    #[error("linear system is singular")]
    Singular,
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("shift search failed: {0}")]
    RootFindingFailure(String),
    #[error("linear term does not vanish (|g| = {norm:.3e})")]
    NonvanishingLinearTerm { norm: f64 },
    #[error("degenerate squeezing denominator")]
    DegenerateDenominator,
    #[error("dimension budget exceeded: {needed} > {budget}")]
    DimensionBudgetExceeded { needed: usize, budget: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
