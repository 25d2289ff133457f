use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set size {0} is outside 0..=24")]
    GroundSize(usize),

    #[error("element {element} is outside [1,{n}]")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("invalid shift pair ({i},{j}) on [1,{n}]: need 1 <= i < j <= n")]
    ShiftPair { i: usize, j: usize, n: usize },

    #[error("{q} is not a subset of [1,{p}]")]
    LinkPrefix { q: String, p: usize },

    #[error("family contains the empty set, so no set meets every member")]
    Uncoverable,

    #[error("family is not {k}-uniform")]
    NotUniform { k: usize },

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("size cap exceeded: {0}")]
    Cap(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn params<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Params(msg.into()))
}
