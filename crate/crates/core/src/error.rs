use thiserror::Error;

use crate::geometry::PointId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown point id {0}")]
    UnknownPointId(PointId),
    #[error("segment endpoints coincide at point {0}")]
    DegenerateSegment(PointId),
    #[error("angle apex coincides with an arm endpoint")]
    DegenerateAngle,
    #[error("polygon has repeated vertices, a bad vertex count, or three collinear consecutive vertices")]
    DegeneratePolygon,
    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("an even number of points is required, got {0}")]
    OddPointCount(usize),
    #[error("instance too large for exhaustive search: {n} > {limit}")]
    InstanceTooLarge { n: usize, limit: usize },
    #[error("no plane perfect matching exists")]
    NoPlanePerfectMatching,
    #[error("rotation cap of {0} exceeded")]
    IterationCapExceeded(u64),
    #[error("unit disk graph is not connected")]
    DisconnectedInput,
    #[error("a seed pair is required for tree rooted at point {0}")]
    SeedRequired(PointId),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error("point {0} is not a leaf of the skeleton tree")]
    NotSkeletonLeaf(PointId),
    #[error("format error on line {line}: {msg}")]
    FormatError { line: usize, msg: String },
    #[error("duplicate point at lines {first} and {second}")]
    DuplicatePoint { first: usize, second: usize },
    #[error("bad parameters: {0}")]
    BadParameters(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownPointId(_) => "UnknownPointId",
            Error::DegenerateSegment(_) => "DegenerateSegment",
            Error::DegenerateAngle => "DegenerateAngle",
            Error::DegeneratePolygon => "DegeneratePolygon",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::OddPointCount(_) => "OddPointCount",
            Error::InstanceTooLarge { .. } => "InstanceTooLarge",
            Error::NoPlanePerfectMatching => "NoPlanePerfectMatching",
            Error::IterationCapExceeded(_) => "IterationCapExceeded",
            Error::DisconnectedInput => "DisconnectedInput",
            Error::SeedRequired(_) => "SeedRequired",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::NotSkeletonLeaf(_) => "NotSkeletonLeaf",
            Error::FormatError { .. } => "FormatError",
            Error::DuplicatePoint { .. } => "DuplicatePoint",
            Error::BadParameters(_) => "BadParameters",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
