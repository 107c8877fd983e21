use thiserror::Error;

/// Errors produced by the walk-search library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("hypercube dimension must be at least 1")]
    DimensionZero,

    #[error("hypercube dimension {n} exceeds the supported maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("solution position {position} out of range for n = {n}")]
    SolutionOutOfRange { position: u64, n: usize },

    #[error("duplicate solution position {0}")]
    DuplicateSolution(u64),

    #[error("a problem needs at least one solution")]
    NoSolutions,

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("dense operators are limited to n <= {max}, got n = {n}")]
    DenseLimit { n: usize, max: usize },

    #[error("direct simulation capped at n <= {cap}, got n = {n} (raise the cap explicitly)")]
    ResourceCap { n: usize, cap: usize },

    #[error("D-hat table is singular at weight {weight} for phase {phi}")]
    SingularPhase { weight: usize, phi: f64 },

    #[error("spectral pipeline requires n >= 2, got n = {0}")]
    SpectralDimension(usize),

    #[error("spectral pipeline requires M < 2^n (every position a solution leaves nothing to search)")]
    AllPositionsSolutions,
}

pub type Result<T> = std::result::Result<T, Error>;
