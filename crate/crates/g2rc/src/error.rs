//! Error types shared by the library.

use thiserror::Error;

use crate::crystal::Letter;

/// Failure to parse a textual letter, weight or document.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("not a crystal element: {0:?} (expected 1..14 or \"empty\")")]
    Letter(String),
    #[error("not a weight: {0:?} (expected \"a,b\")")]
    Weight(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// A rigged configuration that violates its defining constraints.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ValidationError {
    #[error("string of length 0 in nu({a})")]
    ZeroLength { a: usize },
    #[error("rigging {rig} out of range [0, {vacancy}] on a {len}-string of nu({a})")]
    RiggingOutOfRange { a: usize, len: usize, rig: i64, vacancy: i64 },
    #[error("negative vacancy number p_{i}^({a}) = {vacancy}")]
    NegativeVacancy { a: usize, i: usize, vacancy: i64 },
    #[error("configuration weight {found} is not dominant")]
    NotDominant { found: crate::crystal::Weight },
}

/// Requested enumeration exceeds the configured bound.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("length {requested} exceeds the enumeration bound {bound}")]
pub struct BoundError {
    pub requested: usize,
    pub bound: usize,
}

/// A tensor operator was applied to the empty path.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("tensor operators need at least one factor")]
pub struct EmptyPathError;

/// The forward step hit a state that no marking or rigging rule covers.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("invalid input: {0}")]
    Invalid(#[from] ValidationError),
    #[error("cannot apply the step to a configuration with L = 0")]
    EmptyLength,
    #[error("rigging rule produced {rig} outside [0, {vacancy}] on a {len}-string of nu({a}); trace: {trace}")]
    Rigging { a: usize, len: usize, rig: i64, vacancy: i64, trace: String },
    #[error("marking reached an uncovered state: {detail}; trace: {trace}")]
    Uncovered { detail: String, trace: String },
}

/// The inverse step could not reconstruct a preimage.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InverseError {
    #[error("invalid input: {0}")]
    Invalid(#[from] ValidationError),
    #[error("letter {letter} cannot be attached: weight becomes non-dominant")]
    NotDominant { letter: Letter },
    #[error("no box-adding rule applies for letter {letter}; trace: {trace}")]
    NoRule { letter: Letter, trace: String },
    #[error("box adding for letter {letter} did not invert the forward step; trace: {trace}")]
    Mismatch { letter: Letter, trace: String },
}
