use thiserror::Error;

use crate::geom::Point;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty guard set")]
    EmptyGuardSet,
    #[error("need at least {needed} guards, got {got}")]
    TooFewGuards { needed: usize, got: usize },
    #[error("non-finite coordinate in input: ({}, {})", .0.x, .0.y)]
    NonFinite(Point),
    #[error("invalid angle {0} (must lie in (0, 2π])")]
    InvalidAngle(f64),
    #[error("invalid inscribed angle {0} (must lie in (0, π))")]
    InvalidInscribedAngle(f64),
    #[error("degenerate chord at ({}, {})", .0.x, .0.y)]
    DegenerateChord(Point),
    #[error("coincident points at ({}, {})", .0.x, .0.y)]
    CoincidentPoints(Point),
    #[error("angle {theta} outside the range handled here: {expected}")]
    WrongRegime { theta: f64, expected: &'static str },
    #[error("cone with apex ({}, {}) is not empty", .apex.x, .apex.y)]
    ConeNotEmpty { apex: Point },
    #[error("numeric degeneracy near ({}, {}): {what}", .at.x, .at.y)]
    Degeneracy { at: Point, what: String },
    #[error("representative probes disagree in face {face} near ({}, {})", .at.x, .at.y)]
    ProbeDisagreement { face: usize, at: Point },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
