//! Error type shared by all modules. Payload values are reported as `f64`
//! regardless of the crate's scalar parameter so the type stays non-generic.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is numerically singular: condition estimate {cond:.3e} exceeds cap {cap:.3e}")]
    SingularOperator { cond: f64, cap: f64 },

    #[error("point {re}{im:+}i is within {dist:.3e} of the spectrum (margin {margin:.3e})")]
    SpectralProximity { re: f64, im: f64, dist: f64, margin: f64 },

    #[error("eigenvalue iteration failed to converge")]
    ConvergenceFailure,

    #[error("matrix is defective or has an ill-conditioned eigenbasis: condition estimate {cond:.3e} exceeds cap {cap:.3e}")]
    DefectiveMatrix { cond: f64, cap: f64 },

    #[error("scalar function undefined at eigenvalue {re}{im:+}i")]
    DomainViolation { re: f64, im: f64 },

    #[error("eigenvalue {re}{im:+}i lies within {dist:.3e} of the branch cut (-inf, 0]; for a shifted evolution operator, select a larger kappa")]
    BranchCutViolation { re: f64, im: f64, dist: f64 },

    #[error("contour quadrature did not converge at {nodes} nodes: last update {delta:.3e}")]
    QuadratureNonconvergence { nodes: usize, delta: f64 },

    #[error("times (t={t}, s={s}) violate 0 <= s <= t <= {horizon}")]
    HorizonViolation { t: f64, s: f64, horizon: f64 },

    #[error("propagator norm {norm:.3e} exceeded the overflow guard {guard:.3e} near t={t}")]
    IntegrationBlowup { norm: f64, guard: f64, t: f64 },

    #[error("finite-difference stencil [{lo}, {hi}] leaves the admissible interval [{s}, {horizon}]")]
    StencilOutOfRange { lo: f64, hi: f64, s: f64, horizon: f64 },

    #[error("finite-difference step-halving disagreement {delta:.3e} exceeds {tol:.3e} at derivative order {order}")]
    DerivativeNoise { delta: f64, tol: f64, order: usize },

    #[error("order {n} exceeds the cap {cap} for finite-difference derivative chains")]
    OrderCapExceeded { n: usize, cap: usize },

    #[error("derivative factor k={k} of the evolution family is numerically singular: condition estimate {cond:.3e}")]
    SingularDerivative { k: usize, cond: f64 },

    #[error("mode {mode} amplitude {amp:.3e} is below the division threshold {threshold:.3e}")]
    ZeroModeDivision { mode: i64, amp: f64, threshold: f64 },

    #[error("expression error: {0}")]
    Expr(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
