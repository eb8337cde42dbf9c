use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("bargaining problem is not essential: no feasible rate pair strictly improves both users")]
    NotEssential,
}

pub type Result<T> = std::result::Result<T, Error>;
