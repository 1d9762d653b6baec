use thiserror::Error;

/// Errors produced by the verification library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("site {site} out of range 1..={num_sites}")]
    SiteOutOfRange { site: usize, num_sites: usize },

    #[error("operator window [{start}, {end}] does not fit on a {num_sites}-site chain")]
    WindowOverflow {
        start: usize,
        end: usize,
        num_sites: usize,
    },

    #[error("invalid bipartition: {0}")]
    InvalidPartition(String),

    #[error("matrix dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("empty keep set for partial trace")]
    EmptyKeepSet,

    #[error("state is not normalized (norm deviates by {deviation:.3e})")]
    UnnormalizedState { deviation: f64 },

    #[error("non-physical density matrix: {0}")]
    NonPhysicalState(String),

    #[error("non-finite entries: {0}")]
    NonFinite(String),

    #[error("iterative solver failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("eigensolver residual {achieved:.3e} exceeds requested tolerance {requested:.3e}")]
    EigenResidual { achieved: f64, requested: f64 },

    #[error("singular input: {0}")]
    SingularInput(String),

    #[error("unknown case id `{0}`")]
    UnknownCase(String),

    #[error("unknown parameter `{name}` for case `{case}`")]
    UnknownParam { case: String, name: String },

    #[error("parameter domain violation for `{case}`: {reason}")]
    DomainViolation { case: String, reason: String },

    #[error("no square-root branch of `{case}` satisfies the gYBE (best residual {best:.3e})")]
    BranchResolutionFailed { case: String, best: f64 },

    #[error("unknown search family `{0}`")]
    UnknownFamily(String),

    #[error("parameter count mismatch: family `{family}` expects {expected}, got {got}")]
    ParamCount {
        family: String,
        expected: usize,
        got: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
