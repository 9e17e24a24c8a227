use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("weight ({0},{1}) is not dominant")]
    NotDominant(i64, i64),

    #[error("weight ({a},{b}) is outside the domain of {what} for modulus {modulus}")]
    OutOfDomain {
        a: i64,
        b: i64,
        modulus: i64,
        what: &'static str,
    },

    #[error("not a tilting character: {0}")]
    NotTilting(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
