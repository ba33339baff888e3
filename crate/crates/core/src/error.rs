use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid coefficient ring: {0}")]
    InvalidLambda(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("coefficient prime ell = {ell} equals the field characteristic")]
    CharacteristicClash { ell: u64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero linear part (not a hyperplane)")]
    ZeroLinearPart,

    #[error("duplicate hyperplane at index {index}")]
    DuplicateHyperplane { index: usize },

    #[error("hyperplane not in arrangement: {0}")]
    NotInArrangement(String),

    #[error("elements belong to different arrangements")]
    ArrangementMismatch,

    #[error("size guard exceeded: {what} = {size} > {limit}")]
    SizeGuard { what: &'static str, size: u128, limit: u128 },

    #[error("the S-configuration requires 0 in S")]
    MissingZeroInS,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("class is not in the required submodule: {0}")]
    NotInSubmodule(String),

    #[error("local detection verification mismatch at hyperplane {hyperplane}: {detail}")]
    VerificationMismatch { hyperplane: usize, detail: String },

    #[error("candidate does not normalize the inertia structure at hyperplane {hyperplane}")]
    DetectionFailed { hyperplane: usize },

    #[error("not a collineation: points {witness:?} are collinear but their images are not")]
    NotCollineation { witness: [usize; 3] },

    #[error("candidate fixes every hyperplane but is not scalar: {0}")]
    NonScalar(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown suite: {0}")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
