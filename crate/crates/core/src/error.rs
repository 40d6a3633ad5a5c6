use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid root system {0}")]
    InvalidType(String),
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("affine Cartan matrix has corank {0}, expected 1")]
    Corank(usize),
    #[error("level k must be nonzero")]
    ZeroLevel,
    #[error("{0} is not a null vector")]
    NotNull(String),
    #[error("term outside the domain: {0}")]
    NotInDomain(String),
    #[error("root {0} lies in no configured orbit")]
    NoOrbit(String),
    #[error("no solution in Q(zeta_{0})")]
    NoSolution(u32),
    #[error("inconsistent shift: {0}")]
    Inconsistent(String),
    #[error("support condition violated: {0}")]
    Support(String),
    #[error("config error in `{key}`: {msg}")]
    Config { key: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
