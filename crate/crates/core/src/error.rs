use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: i64, rank: usize },

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("endomorphism is not invertible: {0}")]
    NotInvertible(String),

    #[error("invalid braid word: {0}")]
    InvalidBraid(String),

    #[error("quotient order {order} exceeds maximum {max}")]
    OrderOverflow { order: u128, max: usize },

    #[error("generated permutation group does not act regularly: {0}")]
    NotRegular(String),

    #[error("surface relator is not killed by the quotient")]
    RelatorNotKilled,

    #[error("invalid quotient: {0}")]
    InvalidQuotient(String),

    #[error("invalid catalog: {0}")]
    InvalidCatalog(String),

    #[error("word does not lie in the kernel (ends at coset {end_point})")]
    NotInKernel { end_point: usize },

    #[error("endomorphism does not preserve the kernel: image of Schreier generator {generator} lands on coset {end_point}")]
    KernelNotPreserved { generator: usize, end_point: usize },

    #[error("endomorphism does not preserve the surface relation (relator conjugate by transversal {transversal} is not null-homologous)")]
    RelatorNotPreserved { transversal: usize },

    #[error("cover homology has nontrivial torsion {0:?}")]
    Torsion(Vec<String>),

    #[error("tower is not nested at level {0}")]
    NotNested(usize),

    #[error("parameter is not on the unit circle: |z| = {0}")]
    NotUnit(f64),

    #[error("matrix dimension {dim} exceeds limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("polynomial has no positive real root")]
    NoPositiveRoot,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
