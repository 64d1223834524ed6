use std::path::Path;

/// Process exit code for configuration / IO problems.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit code for physics or numerics problems.
pub const EXIT_PHYSICS: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad or inconsistent configuration (TOML syntax, missing keys,
    /// invariant violations in input files, unknown CLI flags).
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem problem; always names the offending path.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A physical precondition or domain restriction was violated
    /// (out-of-range wavelength, infeasible grating, grid too coarse, ...).
    #[error("{0}")]
    Physics(String),

    /// A numerical procedure failed (root not bracketed, SVD or fit did
    /// not converge, ...).
    #[error("{0}")]
    Numeric(String),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Exit code contract: 0 success, 1 physics/numeric failure,
    /// 2 config/IO failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io { .. } => EXIT_CONFIG,
            Error::Physics(_) | Error::Numeric(_) => EXIT_PHYSICS,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
