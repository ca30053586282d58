use crate::solver::SolveReport;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the numerical pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A domain-type invariant failed (non-finite entry, non-monotone zeros, …).
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Requested Gauss–Legendre order outside the supported range 1..=64.
    #[error("unsupported quadrature order {0} (supported range is 1..=64)")]
    UnsupportedOrder(usize),

    /// An integrand returned NaN or ±∞ at a quadrature node.
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFiniteIntegrand(f64),

    /// Input sequence longer than the operator truncation.
    #[error("dimension mismatch: sequence length {len} exceeds truncation {truncation}")]
    DimensionMismatch { len: usize, truncation: usize },

    /// A perturbation entry left the admissible region |δₙ| < ¼ of the
    /// nonlinear operator.
    #[error("perturbation too large: |delta_{index}| = {value:.6} >= 0.25")]
    DeltaTooLarge { index: usize, value: f64 },

    /// Partial-fraction constant requested with unsupported arity.
    #[error("unsupported arity {0} for the partial-fraction constant (supported range is 2..=4)")]
    UnsupportedArity(usize),

    /// The fixed-point iteration exhausted its budget. Carries the partial
    /// report so diagnostics survive the failure.
    #[error("no convergence after {} iterations (last step norm {:.3e})",
            report.iterations, report.last_step_norm())]
    NoConvergence { report: Box<SolveReport> },

    /// Certificates were requested for an unconverged solve.
    #[error("solve did not converge; ball certificates require a converged report")]
    NotConverged,

    /// Evaluation point outside the validity range of the tail model.
    #[error("evaluation point |x| = {x} outside tail-model range (limit {limit})")]
    OutOfRange { x: f64, limit: f64 },

    /// Invalid solver or evaluator configuration.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
