use thiserror::Error;

/// Errors produced by the library.
///
/// Structural errors (bad shapes, bad labels, out-of-domain parameters) are
/// distinguished from mathematical failures discovered during a computation
/// (a triangle or Ptolemy violation in data that was otherwise well-formed),
/// so callers can map them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("distance matrix must be square: {rows} rows for {labels} labels")]
    BadShape { rows: usize, labels: usize },

    #[error("distance matrix needs at least one point")]
    Empty,

    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("matrix not symmetric at ({i}, {j}): {a} vs {b}")]
    NotSymmetric { i: String, j: String, a: f64, b: f64 },

    #[error("entry ({i}, {j}) = {value} must be positive")]
    NonPositiveEntry { i: String, j: String, value: f64 },

    #[error("diagonal entry for {label} is {value}, expected 0")]
    NonzeroDiagonal { label: String, value: f64 },

    #[error("entry ({i}, {j}) is not finite")]
    NonFiniteEntry { i: String, j: String },

    #[error("label {0:?} not found")]
    LabelNotFound(String),

    #[error("matrices are not over the same label set")]
    LabelSetMismatch,

    #[error("need exactly {expected} points, got {got}")]
    WrongPointCount { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("triangle inequality fails on ({}, {}, {}): {lhs} > {rhs}", triple[0], triple[1], triple[2])]
    TriangleViolation { triple: [String; 3], lhs: f64, rhs: f64 },

    #[error("Ptolemy inequality fails on ({}, {}, {}, {}): slack {slack}", quadruple[0], quadruple[1], quadruple[2], quadruple[3])]
    PtolemyViolation { quadruple: [String; 4], slack: f64 },

    #[error("side bound exceeded for pair ({}, {}): distance {distance} > bound {bound}", pair[0], pair[1])]
    SideBoundExceeded { pair: [String; 2], distance: f64, bound: f64 },

    #[error("slice dimension for m = {m} is n = {n}, beyond the feasible limit of {limit}")]
    InfeasibleSchedule { m: u32, n: String, limit: usize },

    #[error("point outside model domain: {0}")]
    ModelDomain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
