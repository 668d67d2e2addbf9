use thiserror::Error;

/// Which singularity guard of the explicit ODE tripped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Guard {
    /// |u| fell below the floor; the ODE divides by u.
    UZero,
    /// |z² − δ′²| fell below the floor; the ODE divides by z² − δ′².
    SingularZ,
}

impl std::fmt::Display for Guard {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Guard::UZero => write!(f, "|u| below floor"),
            Guard::SingularZ => write!(f, "|z^2 - delta'^2| below floor"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series centers differ")]
    CenterMismatch,

    #[error("series must have at least one coefficient")]
    EmptySeries,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("constant term {value:e} is below the near-zero floor {floor:e}")]
    NearZeroConstant { value: f64, floor: f64 },

    #[error("order {actual} is insufficient, at least {required} required")]
    InsufficientOrder { required: usize, actual: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("closed form requires an expansion about the origin, got center {0}")]
    WrongCenter(f64),

    #[error("degenerate solve for coefficient {index}: slope {slope:e} below {threshold:e}")]
    DegenerateSolve {
        index: usize,
        slope: f64,
        threshold: f64,
    },

    #[error("radius estimate needs at least two nonzero tail coefficients")]
    NoRadiusEstimate,

    #[error("finite-difference step {h:e} too large for eta = {eta}")]
    StepTooLarge { eta: f64, h: f64 },

    #[error("singular right-hand side evaluation: {0}")]
    SingularEvaluation(Guard),

    #[error("initial condition rejected: {0}")]
    RejectedInitialCondition(Guard),

    #[error("pole of the temporal factor at t = {t} (nearest pole time {pole_time:?})")]
    Pole { t: f64, pole_time: Option<f64> },

    #[error("real root of a negative bracket with even index {index}; use complex mode")]
    Branch { index: u32 },

    #[error("initial value must be nonzero")]
    InvalidInitial,

    #[error("inconsistent parameters: {0}")]
    InconsistentParameters(String),

    #[error("point {z} lies outside the trusted disk of radius {radius} about {center}")]
    OutOfRadius { z: f64, center: f64, radius: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
