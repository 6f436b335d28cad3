//! Structural integrity at the maximum-load point and the design's cost.

mod cost;
mod stress;

pub use cost::{compute_cost, CostBreakdown};
pub use stress::{evaluate_structure, static_margin, FailingComponent, StressReport};

/// Pinned structural constants. Artifact choices, not measured values.
pub mod constants {
    /// Gust angle of attack assumed at max-Q, degrees.
    pub const GUST_AOA_DEG: f64 = 2.0;
    /// Allowed stress is `yield_strength / SAFETY_FACTOR`.
    pub const SAFETY_FACTOR: f64 = 1.0;
    /// Flat-plate flutter constant (NACA TN 4197 simplification).
    pub const FLUTTER_CONSTANT: f64 = 1.337;
    /// Reported flutter margin when the rocket is not moving.
    pub const MAX_REPORTED_MARGIN: f64 = 1.0e6;
}
