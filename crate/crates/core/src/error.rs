use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("degree window overflow: {0}")]
    DegreeOverflow(String),

    #[error("DG axiom violated: {0}")]
    Axiom(String),

    #[error("hom space infinite or not stabilized within path-length cap {cap}: {detail}")]
    InfiniteHom { cap: usize, detail: String },

    #[error("Maurer-Cartan equation fails: {0}")]
    MaurerCartan(String),

    #[error("Drinfeld quotient depth must be at least 2, got {0}")]
    DepthTooSmall(usize),

    #[error("outside the materialized range: {0}")]
    OutsideMaterializedRange(String),

    #[error("degree {degree} outside the trust window for ({source_obj}, {target_obj}); increase depth")]
    OutsideTrustWindow { source_obj: String, target_obj: String, degree: i32 },

    #[error("Gram matrix is not unimodular (det = {0}); supply a Serre matrix")]
    NotUnimodular(String),

    #[error("left and right kernels of the Euler form disagree; numerical group is ill-defined")]
    KernelsDisagree,

    #[error("kernel not mapped into kernel: witness {0}")]
    KernelNotPreserved(String),
}
