use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid object: {0}")]
    InvalidObject(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("category mismatch: expected {expected}, found {found}")]
    CategoryMismatch { expected: String, found: String },
    #[error("morphisms are not composable: {0}")]
    NotComposable(String),
    #[error("enumeration into {object} hit the window bound {bound}")]
    WindowExhausted { object: String, bound: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("predicate family is not closed under the action: {0}")]
    NotActionClosed(String),
    #[error("map is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("name pool of size {got} is too small, need at least {need}")]
    PoolTooSmall { need: usize, got: usize },
    #[error("finitary endomorphism exists: {0}")]
    FinitaryEndoExists(String),
    #[error("certificate schema violation: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
