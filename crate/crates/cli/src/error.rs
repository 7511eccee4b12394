use thiserror::Error;

use majfix_core::{GridError, IterationError, MajorantError, ModulusError, ZooError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INADMISSIBLE: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("start at distance {rho0} from the center is not admissible")]
    InadmissibleStart { rho0: f64 },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::InadmissibleStart { .. } => EXIT_INADMISSIBLE,
            CliError::Io(_) | CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

// Construction failures all stem from the problem description.
impl From<ZooError> for CliError {
    fn from(e: ZooError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ModulusError> for CliError {
    fn from(e: ModulusError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<MajorantError> for CliError {
    fn from(e: MajorantError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<IterationError> for CliError {
    fn from(e: IterationError) -> Self {
        match e {
            IterationError::InadmissibleStart { rho0 } => CliError::InadmissibleStart { rho0 },
            IterationError::Majorant(m) => m.into(),
            IterationError::Dimension { .. } | IterationError::InconsistentOffset { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}
