//! Crate-wide error type.
//!
//! Variants are grouped by origin: validation errors (bad inputs or
//! configuration) and numerical-gate errors (a smallness condition or
//! certified bound failed at runtime). The CLI maps the former to exit
//! code 2 and the latter to exit code 3.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    // ---- validation -------------------------------------------------
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no subset of the spatial structure covers the support {support:?}")]
    NoCoveringSet { support: Vec<i64> },

    #[error("enumeration of {requested} index vectors exceeds the budget {budget}")]
    CapTooLarge { requested: u128, budget: u128 },

    #[error("incompatible series structures: {0}")]
    StructureMismatch(String),

    #[error("point outside the series domain: {0}")]
    DomainViolation(String),

    #[error("product support {support:?} is covered by no product set; extend the spatial structure")]
    SupportOverflow { support: Vec<i64> },

    // ---- numerical gates --------------------------------------------
    #[error("supremum search did not converge: {0}")]
    NoConvergence(String),

    #[error("sequence product diverges under the configured schedule (term ratio {ratio:.4} at nu={nu})")]
    Divergence { nu: usize, ratio: f64 },

    #[error(
        "nonresonance violated at k={k:?}, ktilde={ktilde:?}: |divisor|={lhs:.6e} < {rhs:.6e}"
    )]
    Violation {
        k: Vec<i32>,
        ktilde: Vec<i32>,
        lhs: f64,
        rhs: f64,
    },

    #[error("retained small divisor below floor at k={k:?}, ktilde={ktilde:?}: {value:.3e}")]
    ZeroDivisor {
        k: Vec<i32>,
        ktilde: Vec<i32>,
        value: f64,
    },

    #[error("truncation discard {measured:.6e} exceeds the certified bound {bound:.6e}")]
    BoundViolated { measured: f64, bound: f64 },

    #[error("flow smallness violated: 16*Gamma_mu*Gamma_rho*E = {0:.6e} > 1")]
    SmallnessViolated(f64),

    #[error("flow trajectory left the analyticity domain at grid node {node}: {detail}")]
    FlowEscape { node: usize, detail: String },

    #[error("Newton iteration diverged after {0} steps")]
    NewtonDiverged(usize),

    #[error("measured new error {measured:.6e} exceeds the certified bound {bound:.6e}")]
    ErrorBoundExceeded { measured: f64, bound: f64 },

    #[error("smallness gate failed: {0}")]
    GateFailed(String),

    #[error("frequency map Jacobian is degenerate (|det| = {0:.3e})")]
    DegenerateJacobian(f64),

    #[error("action-angle chart is undefined at the origin")]
    OriginExcluded,

    #[error("quadrature and ODE cross-check disagree: {quad:.12e} vs {ode:.12e}")]
    QuadratureStall { quad: f64, ode: f64 },

    #[error("generalized trig property violated: {0}")]
    PropertyViolation(String),

    #[error("adaptive step rejected below minimum step size at t={0:.6e}")]
    StepRejected(f64),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit code classification used by the CLI: 2 for validation
    /// errors, 3 for numerical-gate failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::NoCoveringSet { .. }
            | Error::CapTooLarge { .. }
            | Error::StructureMismatch(_)
            | Error::DomainViolation(_)
            | Error::SupportOverflow { .. }
            | Error::Io(_)
            | Error::Json(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
