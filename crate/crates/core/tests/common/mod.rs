//! Shared by several test targets: independent reference formulas and
//! random flight outcomes.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rocketbench::sim::{FlightOutcome, MaxQState, SimFailure};

/// Altitude reward written straight from the scoring definition; shares no
/// code with the library.
pub fn oracle_altitude(
    apogee: f64,
    horizontal_distance: f64,
    total_cost: f64,
    impact_velocity: f64,
    structural_failure: bool,
    target_apogee: f64,
) -> f64 {
    let percent_difference = (apogee - target_apogee).abs() / target_apogee;
    let distance_reward = f64::max(0.0, 1.0 - percent_difference);
    let structural_failure_reward = if structural_failure { 0.0 } else { 1.0 };
    let max_horz_distance = target_apogee * 0.3;
    let horz_distance_reward = f64::max(0.0, 1.0 - horizontal_distance / max_horz_distance);
    let cost_reward = f64::max(0.0, 1.0 - total_cost / 1000.0);
    let impact_reward = f64::max(0.0, 1.0 - impact_velocity.abs() / 25.0);
    0.5 * distance_reward
        + 0.1 * structural_failure_reward
        + 0.1 * horz_distance_reward
        + 0.15 * cost_reward
        + 0.15 * impact_reward
}

/// Precision-landing reward with the standard weights 0.75/0.05/0.05/0.05.
#[allow(clippy::too_many_arguments)]
pub fn oracle_landing(
    landing_x: f64,
    landing_y: f64,
    target_x: f64,
    target_y: f64,
    total_cost: f64,
    impact_velocity: f64,
    structural_failure: bool,
) -> f64 {
    let landing_error = ((landing_x - target_x).powi(2) + (landing_y - target_y).powi(2)).sqrt();
    let target_distance = (target_x.powi(2) + target_y.powi(2)).sqrt();
    let landing_reward = f64::max(0.0, 1.0 - landing_error / target_distance);
    let structural = if structural_failure { 0.0 } else { 1.0 };
    let cost_reward = f64::max(0.0, 1.0 - total_cost / 1000.0);
    let safety = f64::max(0.0, 1.0 - impact_velocity.abs() / 25.0);
    0.75 * landing_reward + 0.05 * structural + 0.05 * cost_reward + 0.05 * safety
}

pub fn outcome(apogee: f64, x: f64, y: f64, impact: f64, cost: f64, broke: bool) -> FlightOutcome {
    FlightOutcome {
        apogee,
        apogee_time: Some(20.0),
        flight_time: 100.0,
        landing_x: x,
        landing_y: y,
        horizontal_distance: x.hypot(y),
        impact_velocity: impact,
        rail_exit_velocity: Some(20.0),
        max_q: MaxQState::default(),
        events: Vec::new(),
        structural_failure: broke,
        total_cost: cost,
        failure: None,
    }
}

/// Outcomes spread well past every clamp, with a share of failed flights.
pub fn random_outcomes(seed: u64, n: usize) -> Vec<FlightOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut o = outcome(
                rng.random_range(0.0..9000.0),
                rng.random_range(-9000.0..9000.0),
                rng.random_range(-9000.0..9000.0),
                rng.random_range(0.0..80.0),
                rng.random_range(0.0..3000.0),
                rng.random_bool(0.3),
            );
            if rng.random_bool(0.05) {
                o.failure = Some(SimFailure::Timeout);
            }
            o
        })
        .collect()
}
