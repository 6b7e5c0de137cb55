use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Cartan type component `{0}`: {1}")]
    InvalidCartanType(String, String),

    #[error("cannot parse space descriptor `{0}`")]
    BadDescriptor(String),

    #[error("node index {0} out of range for rank {1}")]
    NodeOutOfRange(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector is not a root of this system: {0:?}")]
    NotARoot(Vec<i64>),

    #[error("root is not a positive root: {0:?}")]
    NotAPositiveRoot(Vec<i64>),

    #[error("root lies in the parabolic subsystem; no quantum data attached: {0:?}")]
    RootInParabolicSubsystem(Vec<i64>),

    #[error("quotient enumeration exceeded cap {cap} (at least {seen} elements)")]
    QuotientCapExceeded { cap: usize, seen: usize },

    #[error("the parabolic equals the whole group; the space is a point")]
    ParabolicIsFullGroup,

    #[error("matrix has a negative entry at ({0}, {1})")]
    NegativeEntry(usize, usize),

    #[error("matrix is not irreducible")]
    NotIrreducible,

    #[error("digraph is not strongly connected")]
    NotStronglyConnected,

    #[error("power iteration did not converge: residual {residual:e} after {iterations} iterations")]
    PowerIterationDiverged { residual: f64, iterations: usize },

    #[error("numeric eigenvalue computation failed to converge")]
    NumericEigFailed,

    #[error("exact polynomial gcd did not stabilize")]
    ExactGcdFailed,

    #[error("residue classes invalid: {0}")]
    BadResidueClasses(String),

    #[error("coroot lattice lift failed for node {node}: {reason}")]
    LiftFailed { node: usize, reason: String },

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    #[error("invalid run configuration: {0}")]
    BadConfig(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
