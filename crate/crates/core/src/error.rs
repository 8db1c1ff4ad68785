use thiserror::Error;

#[derive(Debug, Error)]
pub enum DendroError {
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("malformed carrier: {0}")]
    MalformedCarrier(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("not a degeneracy: {0}")]
    NotDegeneracy(String),
    #[error("mismatched endpoints: {0}")]
    Mismatch(String),
    #[error("invalid presheaf: {0}")]
    InvalidPresheaf(String),
    #[error("invalid presheaf map: {0}")]
    InvalidMap(String),
    #[error("not a monomorphism: {0}")]
    NotMono(String),
    #[error("not normal: {0}")]
    NotNormal(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("search budget of {0} steps exhausted")]
    Budget(u64),
    #[error("{0}")]
    Algorithm(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unknown name: {0}")]
    Unknown(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DendroError>;
