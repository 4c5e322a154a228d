use thiserror::Error;

/// Exit status for a run that stopped on its evaluation budget.
pub const EXIT_BUDGET: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] vqls::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn is_numerical(&self) -> bool {
        use vqls::Error as E;
        match self {
            CliError::Config(_) => false,
            CliError::Core(e) => matches!(
                e,
                E::Singular(_) | E::VanishingNorm(_) | E::Numerical(_) | E::NotNormalized(_)
            ),
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.is_numerical() {
            EXIT_NUMERICAL
        } else {
            EXIT_CONFIG
        }
    }

    /// Machine-readable reason printed alongside the message.
    pub fn reason(&self) -> &'static str {
        if self.is_numerical() {
            "numerical_failure"
        } else {
            "config_error"
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
