use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("curve is not admissible: {0}")]
    NonAdmissible(String),
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("Fourier transform never decays below {threshold} on the sampled radii")]
    InsufficientDecay { threshold: f64 },
    #[error("quadrature missed tolerance {tol:e}: estimate {estimate:e} after {panels} panels")]
    ToleranceNotMet { tol: f64, estimate: f64, panels: usize },
    #[error("eta = {eta} is outside the admissible range {range}")]
    InadmissibleEta { eta: f64, range: String },
    #[error("parameter {param} outside {domain}")]
    OutOfDomain { param: f64, domain: String },
    #[error("series diverges: {0}")]
    DivergentParameters(String),
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },
    #[error("measured decay exponent {delta_hat} gives s*delta = {product} <= 1")]
    DecayTooWeak { delta_hat: f64, product: f64 },
    #[error("curve case cannot be decided: {0}")]
    AmbiguousCurve(String),
    #[error("points violate admissibility: {violations:?} (rank {rank})")]
    InadmissiblePoints { violations: Vec<String>, rank: usize },
    #[error("spectral resolution exceeded: {tail_fraction:e} of the energy sits in the top modes")]
    ResolutionExceeded { tail_fraction: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
