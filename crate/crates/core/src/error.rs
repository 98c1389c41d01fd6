//! Error type shared by all model operations.

use thiserror::Error;

/// Errors raised by scenario validation, geometry construction and the
/// probability / Monte Carlo operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// Scenario parameters violate their domain (`0 < alpha <= 1`, `beta > 0`,
    /// `gamma > 0`, derived street width `> 0`).
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// Link geometry violates its domain (non-negative heights, positive
    /// distance and frequency).
    #[error("invalid link geometry: {0}")]
    InvalidLink(String),

    /// A scalar argument is outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A per-building operation was called although the expected building
    /// count along the span is zero.
    #[error("no buildings along the span; treat the path as unobstructed")]
    NoBuildings,

    /// A building index lies outside `1..=count` for its segment.
    #[error("index {index} outside 1..={count}")]
    IndexOutOfRange { index: u32, count: u32 },

    /// A position is on the wrong side of the ground-reflection point.
    #[error("segment membership violated: {0}")]
    SegmentMembership(String),

    /// Geometry degenerates (for example both terminals at ground level, so
    /// no reflection point exists).
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// Scene extent too small for the requested scenario.
    #[error("scene extent {extent} m below minimum {minimum} m")]
    ExtentTooSmall { extent: f64, minimum: f64 },

    /// A point lies outside the generated scene.
    #[error("point outside scene: {0}")]
    OutsideScene(String),
}
