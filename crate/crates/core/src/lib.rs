//! Non-crossing bottleneck matchings of planar point sets.

pub mod error;
pub mod blossom;
pub mod bottleneck_one;
pub mod bottleneck_two;
pub mod geometry;
pub mod harness;
pub mod matching;
pub mod oracle;
pub mod proximity;
pub mod udg_matching;

pub use error::{Error, Result};
pub use geometry::{Point, PointId, PointSet, SqLen};
pub use matching::{validate, Matching, ValidationReport};
