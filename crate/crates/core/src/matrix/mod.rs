//! Patterns, host matrices and containment.

mod bitmatrix;
mod containment;
mod pattern;
mod shape;

pub use bitmatrix::BitMatrix;
pub use containment::{contains, find_occurrence, occurrences, Occurrence};
pub(crate) use containment::{CompiledPattern, Matcher};
pub use pattern::Pattern;
pub use shape::Shape;
