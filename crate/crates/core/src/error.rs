use thiserror::Error;

/// Reasons a candidate subspace cannot parametrize a Lebesgue type decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LRejection {
    /// The candidate is not contained in the closure of `dom T*`.
    NotInDomainClosure,
    /// The candidate meets `dom T*` in a nonzero vector.
    MeetsDomain,
}

impl std::fmt::Display for LRejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LRejection::NotInDomainClosure => {
                f.write_str("subspace is not contained in the closure of dom T*")
            }
            LRejection::MeetsDomain => f.write_str("subspace meets dom T* nontrivially"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("mixed scalar modes: {0}")]
    MixedMode(String),

    #[error("operation requires float mode: {0}")]
    ExactModeUnsupported(&'static str),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("vector is not in the range of the representing operator")]
    NotInRange,

    #[error("representing operators have different ranges")]
    RangesDiffer,

    #[error("A*A + B*B is not an orthogonal projection (defect {0:e})")]
    NotQNormalized(f64),

    #[error("A*A + B*B is not the identity (defect {0:e})")]
    NotNormalized(f64),

    #[error("equivalent criteria disagree on {property}: {trace}")]
    CriteriaDisagree {
        property: &'static str,
        trace: String,
    },

    #[error("invalid subspace L: {0}")]
    InvalidL(LRejection),

    #[error("subspace L violates the closure compatibility condition")]
    IncompatibleL,

    #[error("B is not almost dominated by A")]
    NotAlmostDominated,

    #[error("the two routes to the Radon-Nikodym derivative disagree (defect {0:e})")]
    RouteDisagreement(f64),

    #[error("competitor C does not satisfy C A = B")]
    NotAFactorization,

    #[error("the two pairs induce different relations")]
    RelationsDiffer,

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures that indicate an internal inconsistency rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::CriteriaDisagree { .. }
                | Error::RouteDisagreement(_)
                | Error::VerificationFailed(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_mismatch(what: impl Into<String>) -> Error {
    Error::DimensionMismatch(what.into())
}
