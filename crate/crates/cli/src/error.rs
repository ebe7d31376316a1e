use ghostdyn_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Help or version text requested; not a failure.
    #[error("{0}")]
    Info(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn usage(key: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Usage(format!("--{key}: {msg}"))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 8,
            CliError::Core(e) => match e {
                CoreError::InputDomain(_)
                | CoreError::NoBifurcationInRange { .. }
                | CoreError::Unsupported(_)
                | CoreError::DegenerateFamily(_)
                | CoreError::DivisionDomain(_) => 3,
                CoreError::NoConvergence { .. } | CoreError::NewtonSingular { .. } | CoreError::QuadratureFailed(_) => 4,
                CoreError::MeasurementFailed { .. } | CoreError::WidenScan { .. } => 5,
                CoreError::ContourDegenerate { .. } | CoreError::ContourContent { .. } => 6,
                CoreError::FitDegenerate(_) | CoreError::InsufficientSamples(_) => 7,
                CoreError::Io(_) => 8,
            },
        }
    }
}
