use alloc::string::String;

/// Errors produced by the design, tuning and simulation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: {masses} masses but {stiffnesses} stiffnesses")]
    LengthMismatch { masses: usize, stiffnesses: usize },

    #[error("modes {first} and {second} have coincident frequencies; Rayleigh coefficients are undetermined")]
    CoincidentModes { first: usize, second: usize },

    #[error("mode index {index} out of range for a {stories}-story building")]
    ModeOutOfRange { index: usize, stories: usize },

    #[error("eigen-analysis failed: {0}")]
    Eigen(String),

    #[error("first mode has a zero top-floor component and cannot be scaled")]
    UnscalableMode,

    #[error("pair (A, B) is not controllable (reciprocal condition {rcond:e})")]
    Uncontrollable { rcond: f64 },

    #[error("pole set is not closed under complex conjugation")]
    NonConjugatePoles,

    #[error("transformation matrix T is singular (eta4 = {eta4:e})")]
    SingularTransform { eta4: f64 },

    #[error("transfer-function zero undefined: {0} is zero")]
    UndefinedZero(&'static str),

    #[error("no feasible tuning tuple: it is not possible to find eta and M0 with this initialization")]
    Infeasible,

    #[error("no stabilizing Riccati solution: {0}")]
    Riccati(String),

    #[error("no complex-conjugate closed-loop pair")]
    NoComplexPair,

    #[error("accelerogram error: {0}")]
    Accelerogram(String),

    #[error("simulation diverged at t = {time} s")]
    Diverged { time: f64 },

    #[error("empty window [{start}, {end}]")]
    EmptyWindow { start: f64, end: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
