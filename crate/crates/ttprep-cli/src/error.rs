//! Error taxonomy mapped onto the documented process exit codes.

/// 2: bad config or malformed input document; 3: a numeric stage failed;
/// 4: filesystem trouble.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Numeric(_) => 3,
            AppError::Io(_) => 4,
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        AppError::Io(format!("{}: {err}", path.display()))
    }
}
