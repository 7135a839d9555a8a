use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MgError {
    #[error("grid dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid level count {0}: at least one level is required")]
    InvalidLevels(usize),

    #[error("level count {0} exceeds the supported maximum of {max}", max = crate::costmodel::MAX_LEVELS)]
    TooManyLevels(u32),

    #[error("semi-coarsening with {levels} levels would coarsen below a single line")]
    SemiCoarseningTooDeep { levels: usize },

    #[error("zero pivot in tridiagonal solve at row {0}")]
    ZeroPivot(usize),

    #[error("operator has a zero diagonal coefficient")]
    ZeroDiagonal,

    #[error("coarsest-level operator is singular")]
    SingularCoarsest,

    #[error("alternating zebra relaxation needs an even sweep count, got {0}")]
    OddAlternatingCount(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("f(inf, c) is undefined for c = {0} >= 0.5")]
    UndefinedInfiniteFactor(f64),

    #[error("least-squares design matrix is rank deficient")]
    RankDeficient,
}

pub type Result<T, E = MgError> = std::result::Result<T, E>;
