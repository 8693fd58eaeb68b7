use thiserror::Error;

/// Everything that can go wrong across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("diffusion coefficient is not uniformly positive: min a = {min} near x = {at}")]
    NonEllipticDiffusion { min: f64, at: f64 },

    #[error("initial slope at x = {at} is {slope} but the boundary datum is {datum}")]
    IncompatibleInitialSlope { at: f64, slope: f64, datum: f64 },

    #[error("exact derivative unavailable for coefficient `{0}` (tabulated form)")]
    DerivativeUnavailable(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no root in bracket for n = {n}, k = {k}")]
    NoRootInBracket { n: usize, k: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("ratio k = {ratio} is outside the hyperbolic regime k < 1")]
    RegimeMismatch { ratio: f64 },

    #[error("index {index} out of range (system holds {len} terms)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("time must be positive, got {0}")]
    InvalidTime(f64),

    #[error("explicit scheme unstable: CFL number {cfl} exceeds 1")]
    UnstableParameters { cfl: f64 },

    #[error("tridiagonal system singular at row {row}")]
    SingularSystem { row: usize },

    #[error("bound violated at t = {t}, x = {x}: |dV/dx| = {gradient} > {bound} + {slack}")]
    DominationViolation { t: f64, x: f64, gradient: f64, bound: f64, slack: f64 },

    #[error("step dt = {dt} too large (limit {limit})")]
    InvalidStep { dt: f64, limit: f64 },

    #[error("{failing} of {pairs} coupled pairs failed the flow checks")]
    CollapseViolation { failing: usize, pairs: usize },

    #[error("path ordering violated: {detail}")]
    OrderingViolation { detail: String },

    #[error("drift b1 falls below b at t = {t}, x = {x}")]
    DriftNotOrdered { t: f64, x: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
