use mzsim_core::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(CoreError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("output error: {0}")]
    Output(String),
}

pub type ScenarioResult<T> = Result<T, ScenarioError>;

impl ScenarioError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config { path: path.into(), message: message.into() }
    }

    /// Process exit code: 2 for invalid configuration, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => 2,
            Self::Numerical(_) => 3,
            Self::Io { .. } | Self::Output(_) => 1,
        }
    }
}

impl From<CoreError> for ScenarioError {
    fn from(e: CoreError) -> Self {
        match e {
            // Parameter-domain violations surface as configuration problems.
            CoreError::Domain(msg) => Self::config("<model>", msg),
            CoreError::InvalidMode { mode, modes } => Self::config("<model>", format!("mode {mode} outside 1..={modes}")),
            other => Self::Numerical(other),
        }
    }
}
