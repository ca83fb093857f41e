use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ambient dimension {dim} exceeds the cap of {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("point {point} is not a point of an ambient space of dimension {dim}")]
    PointOutOfRange { point: u64, dim: usize },
    #[error("linear map is not injective")]
    SingularMap,
    #[error("contracting entire geometry")]
    ContractEntireGeometry,
    #[error("flat lives in dimension {flat}, matroid in dimension {matroid}")]
    AmbientMismatch { flat: usize, matroid: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid pattern `{0}`: {1}")]
    Pattern(String, String),
    #[error("invalid search spec: {0}")]
    Spec(String),
    #[error("forced pattern violates the constraints: {0}")]
    InfeasibleForcing(String),
    #[error("unknown claim `{0}`")]
    UnknownClaim(String),
    #[error("invalid claim parameters: {0}")]
    ClaimParams(String),
}
