use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// `x` is within the root tolerance of a zero of `J_nu`, where `F_nu` has a pole.
    #[error("pole of F_nu: x = {x} is a zero of J_{nu}")]
    Pole { nu: f64, x: f64 },

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("zero denominator: weighted q-norm {norm:e} below tolerance")]
    ZeroDenominator { norm: f64 },

    /// A parameter tuple falls outside the hypotheses of the problem being solved.
    #[error("hypothesis violated: {condition} (required by {context})")]
    Hypothesis { condition: String, context: String },

    #[error("grid incompatibility: {0}")]
    Grid(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("constraint violated: weighted mean {mean:e} exceeds tolerance {tol:e}")]
    Constraint { mean: f64, tol: f64 },

    #[error("meshing error: {0}")]
    Mesh(String),

    #[error("domain is not symmetric with respect to the origin: {0}")]
    Symmetry(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub fn hypothesis(condition: impl Into<String>, context: impl Into<String>) -> Error {
    Error::Hypothesis {
        condition: condition.into(),
        context: context.into(),
    }
}
