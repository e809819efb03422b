use thiserror::Error;

/// Errors produced by the core pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("points {0} and {1} are closer than {tol} m", tol = crate::geometry::DUPLICATE_TOLERANCE)]
    DuplicatePoint(usize, usize),

    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),

    #[error("edge ({0}, {1}) is not shared by both cycles")]
    SharedEdgeMissing(usize, usize),

    #[error("step must lie strictly between 0 and 1, got {0}")]
    InvalidStep(f64),

    #[error("descriptor lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("the two source points of a correspondence pair coincide")]
    DegeneratePair,

    #[error("{have} correspondences available, at least {need} required")]
    NotEnoughCorrespondences { have: usize, need: usize },

    #[error("no model reached the minimum consensus")]
    NoConsensus,

    #[error("merging sub-map {0} failed")]
    MergeFailure(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
