use thiserror::Error;

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("cannot write {0}: {1}")]
    Output(String, std::io::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::Output(..) => 2,
            CliError::Contract(_) => 3,
            CliError::Numeric(_) | CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => 4,
        }
    }
}

impl From<hpme::Error> for CliError {
    fn from(e: hpme::Error) -> Self {
        use hpme::Error::*;
        let msg = e.to_string();
        match e {
            DegenerateSolve { .. } | NonFinite(_) | NoRadiusEstimate | SingularEvaluation(_) | Pole { .. } => {
                CliError::Numeric(msg)
            }
            CenterMismatch
            | EmptySeries
            | NearZeroConstant { .. }
            | InsufficientOrder { .. }
            | InvalidParameter { .. }
            | Domain(_)
            | WrongCenter(_)
            | StepTooLarge { .. }
            | RejectedInitialCondition(_)
            | Branch { .. }
            | InvalidInitial
            | InconsistentParameters(_)
            | OutOfRadius { .. } => CliError::Invalid(msg),
        }
    }
}
