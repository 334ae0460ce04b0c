use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument {arg} outside the domain ({why})")]
    Domain {
        func: &'static str,
        arg: f64,
        why: &'static str,
    },
    #[error("integration failed at t={t}: {reason}")]
    Integration {
        t: f64,
        last_state: Vec<f64>,
        reason: String,
    },
    #[error("shooting: {0}")]
    Shooting(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no convergence: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
