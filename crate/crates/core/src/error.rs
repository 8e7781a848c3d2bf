//! Error type shared by all modules.

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("energy {eps:e} is at or below the potential minimum {min:e}")]
    EnergyBelowMinimum { eps: f64, min: f64 },

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    QuadratureAccuracy { achieved: f64, requested: f64 },

    #[error("classical period diverges on the separatrix (eps = 0)")]
    DivergentPeriod,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("distribution is logarithmically divergent at nu = 0")]
    SingularPoint,

    #[error(
        "grid check failed: halving the step moved an eigenvalue by {delta:e} (bound {bound:e})"
    )]
    GridAccuracy { delta: f64, bound: f64 },

    #[error("solver internal check failed: {0}")]
    SolverInconsistency(String),

    #[error("fewer than two overlap entries at or above the weight floor {floor:e}")]
    InsufficientSupport { floor: f64 },

    #[error("window too narrow: {0}")]
    WindowTooNarrow(String),

    #[error("overlap window captured only {captured} of the packet norm; widen the energy window")]
    UnderCoverage { captured: f64 },

    #[error("method `{method}` does not apply: {reason}")]
    MethodMismatch {
        method: &'static str,
        reason: String,
    },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("all sweep points failed:\n{0}")]
    SweepFailed(String),

    #[error("{0}")]
    OutOfRange(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
