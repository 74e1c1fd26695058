use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("query point coincides with a stretch center (|x - y| < 1e-300 * r)")]
    SingularPoint,

    #[error("point lies outside the tree domain")]
    OutsideDomain,

    #[error("gradient queried exactly on an interface sphere; caller should resample")]
    OnInterface,

    #[error("forced grid cannot host {requested} balls of radius {radius}: capacity {capacity}")]
    InfeasibleForcedCount {
        requested: usize,
        radius: f64,
        capacity: usize,
    },

    #[error("schedule infeasible: {0}")]
    ScheduleInfeasible(String),

    #[error("operation requires a Cantor schedule with forced branching")]
    ScheduleMismatch,

    #[error("node path does not descend spine balls")]
    PathNotSpine,

    #[error("image triangle subtends a solid angle below tolerance; reference point too close to the image surface")]
    DegenerateImage,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tree file does not match expected layout: {0}")]
    MalformedTree(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
