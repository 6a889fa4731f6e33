use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coordinate {coord} out of range 1..={k}")]
    CoordinateOutOfRange { coord: usize, k: usize },

    #[error("element {element} not in ground set of size {n}")]
    UnknownElement { element: usize, n: usize },

    #[error("shape mismatch: ({n_left} elements, k={k_left}) vs ({n_right} elements, k={k_right})")]
    ShapeMismatch {
        n_left: usize,
        k_left: usize,
        n_right: usize,
        k_right: usize,
    },

    #[error("k must be in 1..=255, got {0}")]
    InvalidK(usize),

    #[error("element {element} has cost 0; costs must be at least 1")]
    ZeroCost { element: usize },

    #[error("element {element} already assigned (coordinate {coord})")]
    AlreadyAssigned { element: usize, coord: usize },

    #[error("seed costs {cost}, exceeding budget {budget}")]
    InfeasibleSeed { cost: u64, budget: u64 },

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("enumeration of {required} items exceeds cap {cap} ({what})")]
    CapExceeded { what: &'static str, required: u128, cap: u128 },

    #[error("generator gave up after {attempts} attempts: {reason}")]
    AttemptsExhausted { attempts: usize, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),
}
