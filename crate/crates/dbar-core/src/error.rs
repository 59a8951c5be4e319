//! Error type shared by all modules.
//!
//! Every failure mode carries a kebab-case category (stable across
//! releases, suitable for matching in scripts) plus a human-readable
//! detail message. Numerical non-convergence is *not* an error: integral
//! routines report it through [`crate::quadrature::IntegralResult::converged`]
//! so partial information is never discarded silently. Errors are reserved
//! for contract violations and for genuinely divergent quantities.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, DbarError>;

/// All error categories raised by the library.
#[derive(Debug, Clone, thiserror::Error)]
pub enum DbarError {
    /// A precondition on arguments was violated (non-positive radius,
    /// mis-ordered axes, empty grids, bad tolerances, ...).
    #[error("invalid-argument: {0}")]
    InvalidArgument(String),

    /// An operation restricted to a specific domain kind (for example
    /// disk-only chord queries) was called on another kind.
    #[error("unsupported-kind: {0}")]
    UnsupportedKind(String),

    /// The expansion point of an area quadrature or operator evaluation
    /// lies outside the domain.
    #[error("invalid-center: {0}")]
    InvalidCenter(String),

    /// A boundary integrand evaluated to NaN or infinity at a node,
    /// typically because the evaluation point sits on the boundary.
    #[error("non-finite-integrand: {0}")]
    NonFiniteIntegrand(String),

    /// A radial model integral does not converge for the requested
    /// parameters (first-power kernel with log order at most 1).
    #[error("divergent-integral: {0}")]
    DivergentIntegral(String),

    /// The regularized singular operator detected sustained growth across
    /// its inner-cutoff schedule; the partial moduli are attached as the
    /// growth diagnostic.
    #[error("divergent-evaluation: {message}; partial moduli {partial_moduli:?}")]
    DivergentEvaluation {
        /// What diverged and where.
        message: String,
        /// |value| of the successive inner-cutoff partial integrals.
        partial_moduli: Vec<f64>,
    },

    /// Two independent evaluation routes disagreed by more than ten times
    /// their combined error estimates — an internal consistency failure.
    #[error("inconsistency: {0}")]
    Inconsistency(String),

    /// A test field was evaluated outside the region where its defining
    /// formula is valid.
    #[error("out-of-intended-domain: {0}")]
    OutOfIntendedDomain(String),

    /// A finite-difference stencil would leave the field's domain of
    /// validity.
    #[error("stencil-out-of-domain: {0}")]
    StencilOutOfDomain(String),

    /// A modulus-of-continuity scale produced no admissible sample pairs
    /// (domain too thin for the requested separation).
    #[error("insufficient-sampling: {0}")]
    InsufficientSampling(String),

    /// Fewer than four usable scales remained for the log-order fit.
    #[error("degenerate-fit: {0}")]
    DegenerateFit(String),

    /// The solver was asked for a configuration it rejects by design
    /// (log order at most 1, where no C¹ solution needs to exist).
    #[error("rejected: {0}")]
    Rejected(String),

    /// A computation that requires converged quadrature exhausted its
    /// refinement budget at the named point.
    #[error("not-converged: {0}")]
    NotConverged(String),
}

impl DbarError {
    /// The stable kebab-case category prefix of this error.
    pub fn category(&self) -> &'static str {
        match self {
            DbarError::InvalidArgument(_) => "invalid-argument",
            DbarError::UnsupportedKind(_) => "unsupported-kind",
            DbarError::InvalidCenter(_) => "invalid-center",
            DbarError::NonFiniteIntegrand(_) => "non-finite-integrand",
            DbarError::DivergentIntegral(_) => "divergent-integral",
            DbarError::DivergentEvaluation { .. } => "divergent-evaluation",
            DbarError::Inconsistency(_) => "inconsistency",
            DbarError::OutOfIntendedDomain(_) => "out-of-intended-domain",
            DbarError::StencilOutOfDomain(_) => "stencil-out-of-domain",
            DbarError::InsufficientSampling(_) => "insufficient-sampling",
            DbarError::DegenerateFit(_) => "degenerate-fit",
            DbarError::Rejected(_) => "rejected",
            DbarError::NotConverged(_) => "not-converged",
        }
    }
}
