use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("xi = {xi} lies outside the profile domain ({lo}, {hi})")]
    OutOfDomain { xi: f64, lo: f64, hi: f64 },

    #[error("bad coefficients for {kind} profile: {reason}")]
    BadCoefficients { kind: String, reason: String },

    #[error("abscissae must be strictly increasing (violated at index {index})")]
    NonMonotoneAbscissae { index: usize },

    #[error("at least {need} samples are required, got {got}")]
    TooFewPoints { got: usize, need: usize },

    #[error("warping function is not positive at xi = {xi} (f = {value})")]
    NonpositiveWarp { xi: f64, value: f64 },

    #[error("{name} loses positivity at xi = {xi} (value {value})")]
    NonpositiveProfile { name: String, xi: f64, value: f64 },

    #[error("u is not positive at xi = {xi} (u = {value})")]
    NonpositiveU { xi: f64, value: f64 },

    #[error("non-finite value while evaluating {what} at xi = {xi}")]
    NonFinite { what: String, xi: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),

    #[error("coefficient alpha - m*rho vanishes; theta is undetermined (bracket = {bracket})")]
    DegenerateCoefficient { bracket: f64 },

    #[error("forbidden parameters: {0}")]
    ForbiddenParameters(String),

    #[error("fiber chart unavailable for the full-tensor check")]
    ChartUnavailable,

    #[error("Riccati blow-up: |h'| exceeded {cap} after xi = {last_xi}")]
    BlowUp { last_xi: f64, cap: f64 },

    #[error("implied fiber constant {implied} does not match fiber theta {fiber}")]
    FiberMismatch { implied: f64, fiber: f64 },

    #[error(
        "implied fiber constant is not constant (max deviation {deviation} around mean {mean})"
    )]
    ThetaNotConstant { mean: f64, deviation: f64 },

    #[error("input is not a solution: residual {residual} at xi = {xi} exceeds {tol}")]
    NotASolution { residual: f64, xi: f64, tol: f64 },

    #[error("estimate bracket vanishes at xi = {xi} while the gradient does not")]
    BracketZero { xi: f64 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("unsupported base: {0}")]
    UnsupportedBase(String),

    #[error("incomplete hypotheses: missing {0}")]
    IncompleteHypotheses(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown catalog id `{0}`")]
    UnknownId(String),
}

pub type Result<T> = std::result::Result<T, Error>;
