use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] hankel_core::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("verification failed: {check} [{paper_ref}] error {max_error:e} > tolerance {tolerance:e}")]
    Verify { check: String, paper_ref: String, max_error: f64, tolerance: f64 },
}

impl CliError {
    /// 0 ok, 1 verification failure, 2 bad configuration or input, 3 quadrature failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verify { .. } => 1,
            CliError::Core(e) if e.is_quadrature() => 3,
            _ => 2,
        }
    }
}
