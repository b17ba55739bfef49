use thiserror::Error;

use crate::atlas::VariableId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("division is not exact in the Laurent ring")]
    NotDivisible,

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("polynomial is not homogeneous: terms have degrees {first:?} and {second:?}")]
    NotHomogeneous { first: Vec<i64>, second: Vec<i64> },

    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,

    #[error("variable {index} is specialized to zero but appears with a negative exponent")]
    ZeroSpecialization { index: usize },

    #[error("matrix is not skew-symmetrizable: {0}")]
    NotSkewSymmetrizable(String),

    #[error("matrix is not square")]
    NotSquare,

    #[error("direction {k} out of range 1..={n}")]
    DirectionOutOfRange { k: usize, n: usize },

    #[error("coefficient positivity violated in an expansion")]
    PositivityViolated,

    #[error("unknown variable id {0}")]
    UnknownVariable(VariableId),

    #[error("cluster {0:?} is not stored in the atlas")]
    UnknownCluster(Vec<VariableId>),

    #[error("atlas does not have principal coefficients at its root")]
    NotPrincipal,

    #[error("atlas exploration is incomplete; operation requires a complete atlas")]
    IncompleteAtlas,

    #[error("no cluster in the atlas contains variable {0}")]
    NoContainingCluster(VariableId),

    #[error("graphs are labeled over different interning tables")]
    TableMismatch,

    #[error("no g-pair found for cluster {cluster:?} along {subset:?}")]
    GPairNotFound { cluster: Vec<VariableId>, subset: Vec<usize> },

    #[error("no Laurent-monomial witness for variable {target} against reference {reference}")]
    WitnessNotFound { reference: VariableId, target: VariableId },

    #[error("witness trichotomy violated: {0}")]
    TrichotomyViolated(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invariant violated: {0}")]
    InvariantViolated(String),

    #[error("parse error: {0}")]
    Parse(String),
}
