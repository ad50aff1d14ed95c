use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("eta support [{lo}, {hi}] is not strictly inside the domain ({a}, {b})")]
    EtaOutsideDomain { lo: f64, hi: f64, a: f64, b: f64 },
    #[error("derivative of component {component} disagrees with finite difference at t = {t}: {exact} vs {numeric}")]
    DerivativeMismatch {
        component: usize,
        t: f64,
        exact: f64,
        numeric: f64,
    },
    #[error("velocity of the curve vanishes near t = {t}")]
    VanishingVelocity { t: f64 },
    #[error("t = {t} lies outside the domain ({a}, {b})")]
    OutOfDomain { t: f64, a: f64, b: f64 },
    #[error("invalid exponent {0}")]
    InvalidExponent(f64),
    #[error("invalid curve specification: {0}")]
    InvalidCurve(String),
    #[error("invalid function specification: {0}")]
    InvalidFunction(String),
    #[error("abscissas have zero variance")]
    DegenerateAbscissas,
    #[error("log-log fit needs positive coordinates, got ({x}, {y})")]
    NonPositive { x: f64, y: f64 },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("resolution {resolution} cannot resolve scale k = {k} (need spacing <= {required})")]
    ResolutionTooCoarse {
        k: i32,
        resolution: f64,
        required: f64,
    },
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),
    #[error("invalid scale range: {0}")]
    InvalidScales(String),
    #[error("level must be positive, got {0}")]
    LevelNonpositive(f64),
    #[error("window indices do not interact: no common point")]
    NonInteracting,
    #[error("grid spacing {spacing} too coarse (need <= {required})")]
    GridTooCoarse { spacing: f64, required: f64 },
    #[error("curve has no zero of J of order >= 2 inside supp eta")]
    CurveNotDegenerate,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o failure on {path}: {source}")]
    IoFailure {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
