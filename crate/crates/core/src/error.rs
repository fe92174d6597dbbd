use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input has the wrong shape (matrix sizes, label counts, index ranges).
    #[error("structural error: {0}")]
    Structure(String),

    /// Generator parameters outside the supported domain.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// Verlinde coefficients are not (close to) nonnegative integers.
    #[error("not modular data: {0}")]
    NotModular(String),

    /// An algebra object fails unit, twist or duality conditions.
    #[error("invalid algebra object: {0}")]
    InvalidAlgebra(String),

    /// Module category decomposition failed or exceeded its search bounds.
    #[error("decomposition not found: {0}")]
    DecompositionNotFound(String),

    /// Module fusion data could not be re-expressed in the simple basis.
    #[error("inconsistent module basis: {0}")]
    InconsistentBasis(String),

    /// The two Kac-Wakimoto membership criteria disagree.
    #[error("KW criteria disagree: twist test {by_twist:?}, monodromy test {by_monodromy:?}")]
    KwCriteriaDisagree {
        by_twist: Vec<usize>,
        by_monodromy: Vec<usize>,
    },

    /// A coset system is internally inconsistent.
    #[error("inconsistent coset system: {0}")]
    InconsistentSystem(String),

    /// An operation requires the KW set to be a group.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Joint diagonalization or eigenvalue labelling failed.
    #[error("spectral error: {0}")]
    Spectral(String),

    /// A bounded search exceeded its budget.
    #[error("search budget exceeded: {0}")]
    SearchBudget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
