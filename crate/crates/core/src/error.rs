use thiserror::Error;

/// Errors raised by bound evaluation, sampling, and optimization.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural precondition on the inputs is violated (shape,
    /// symmetry, column-permutation property, ...).
    #[error("structural error: {0}")]
    Structure(String),

    /// A matrix required to be (numerically) positive definite is not.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// The requested constraint set contains no point.
    #[error("infeasible constraint set: {0}")]
    Infeasible(String),

    /// The Bayesian Cramér-Rao bound does not exist because the prior
    /// Fisher information is infinite (Nakagami shape m < 1).
    #[error("BCRB inapplicable: prior Fisher information is infinite for Nakagami shape m = {m}")]
    BcrbInapplicable { m: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
