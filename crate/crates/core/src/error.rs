use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate id `{0}`")]
    Duplicate(String),
    #[error("arrow `{arrow}` has unknown endpoint `{vertex}`")]
    Dangling { arrow: String, vertex: String },
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("relation {0}·{1} is not composable")]
    NotComposable(String, String),
    #[error("not gentle: {0}")]
    NotGentle(String),
    #[error("not a fringed quiver: {0}")]
    NotFringed(String),
    #[error("not a string: {0}")]
    NotAString(String),
    #[error("invalid flow: {0}")]
    InvalidFlow(String),
    #[error("boundary reached at `{0}`")]
    Boundary(String),
    #[error("not comparable")]
    NotComparable,
    #[error("band kisses a route of the clique")]
    IncompatibleBand,
    #[error("arrow set is not {0}")]
    BadArrowSet(&'static str),
    #[error("not paired")]
    NotPaired,
    #[error("invalid framed graph: {0}")]
    BadFraming(String),
    #[error("decomposition failed: {0}")]
    Decomposition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
