use thiserror::Error;

/// Everything that can go wrong in the solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("dispersion relation has a pole at k = {re} + {im}i")]
    PoleOfDispersion { re: f64, im: f64 },

    #[error("characteristic polynomial is degenerate (all coefficients vanish)")]
    DegeneratePolynomial,

    #[error("expected exactly one radiating root, found {candidates}")]
    NoUniqueRadiatingRoot { candidates: usize },

    #[error("operation only defined for the local third-order and nonlocal second-order families")]
    UncoveredFamily,

    #[error("harmonic n = {n} sits on the uncovered resonance; supply u0'(0) to close the map")]
    UncoveredHarmonic { n: i32 },

    #[error("quadrature did not converge: error estimate {err_estimate:e} after {evaluations} evaluations")]
    NonConvergent { err_estimate: f64, evaluations: usize },

    #[error("strategy not applicable here: {0}")]
    StrategyDomain(String),

    #[error("point (omega0 = {omega0}, xi = {xi}) lies on a region boundary")]
    OnRegionBoundary { omega0: f64, xi: f64 },

    #[error("modulation solution only covers subcritical forcing")]
    SupercriticalUnsupported,

    #[error("amplitude is singular at the group velocity ray")]
    AtGroupVelocity,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("time step {dt} exceeds the stability limit {limit}")]
    StabilityViolation { dt: f64, limit: f64 },

    #[error("wave front reaches the sponge layer before t = {t_final}")]
    FrontExitedDomain { t_final: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
