//! The two challenge reward functions.
//!
//! Each formula is the task's scoring code transcribed line for line, with the
//! clamps; only the weights are configurable.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sim::{FlightOutcome, SimFailure};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AltitudeWeights {
    pub distance: f64,
    pub structural: f64,
    pub drift: f64,
    pub cost: f64,
    pub impact: f64,
}

impl Default for AltitudeWeights {
    fn default() -> Self {
        AltitudeWeights {
            distance: 0.5,
            structural: 0.1,
            drift: 0.1,
            cost: 0.15,
            impact: 0.15,
        }
    }
}

impl AltitudeWeights {
    pub fn sum(&self) -> f64 {
        self.distance + self.structural + self.drift + self.cost + self.impact
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AltitudeChallengeSpec {
    /// Metres.
    pub target_apogee: f64,
    pub weights: AltitudeWeights,
    /// USD.
    pub max_cost_scale: f64,
    /// m/s.
    pub max_impact_velocity: f64,
    /// `max_horz_distance = target_apogee * horz_scale_factor`.
    pub horz_scale_factor: f64,
}

impl Default for AltitudeChallengeSpec {
    fn default() -> Self {
        AltitudeChallengeSpec {
            target_apogee: 3048.0,
            weights: AltitudeWeights::default(),
            max_cost_scale: 1000.0,
            max_impact_velocity: 25.0,
            horz_scale_factor: 0.3,
        }
    }
}

/// Landing weights. The standard set sums to 0.9 (structure weighted 5%);
/// [`LandingWeights::UNIT_SUM`] puts 15% on structure so a perfect flight
/// scores 1.0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandingWeights {
    pub landing: f64,
    pub structural: f64,
    pub cost: f64,
    pub impact: f64,
}

impl LandingWeights {
    pub const STANDARD: LandingWeights = LandingWeights {
        landing: 0.75,
        structural: 0.05,
        cost: 0.05,
        impact: 0.05,
    };
    pub const UNIT_SUM: LandingWeights = LandingWeights {
        landing: 0.75,
        structural: 0.15,
        cost: 0.05,
        impact: 0.05,
    };

    pub fn sum(&self) -> f64 {
        self.landing + self.structural + self.cost + self.impact
    }
}

impl Default for LandingWeights {
    fn default() -> Self {
        LandingWeights::STANDARD
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LandingChallengeSpec {
    /// Metres east of the pad.
    pub target_x: f64,
    /// Metres north of the pad.
    pub target_y: f64,
    pub weights: LandingWeights,
    pub max_cost_scale: f64,
    pub max_impact_velocity: f64,
}

impl Default for LandingChallengeSpec {
    fn default() -> Self {
        LandingChallengeSpec {
            target_x: 4000.0,
            target_y: 4000.0,
            weights: LandingWeights::default(),
            max_cost_scale: 1000.0,
            max_impact_velocity: 25.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "challenge", rename_all = "snake_case")]
pub enum Challenge {
    Altitude(AltitudeChallengeSpec),
    Landing(LandingChallengeSpec),
}

impl Challenge {
    pub fn kind(&self) -> ChallengeKind {
        match self {
            Challenge::Altitude(_) => ChallengeKind::Altitude,
            Challenge::Landing(_) => ChallengeKind::Landing,
        }
    }

    /// Total of a flawless flight: the weight sum.
    pub fn max_total(&self) -> f64 {
        match self {
            Challenge::Altitude(s) => s.weights.sum(),
            Challenge::Landing(s) => s.weights.sum(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChallengeKind {
    Altitude,
    Landing,
}

impl fmt::Display for ChallengeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChallengeKind::Altitude => "altitude",
            ChallengeKind::Landing => "landing",
        })
    }
}

/// Why a design scored zero without flying or finishing its flight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreFailure {
    DrcFailed,
    Timeout,
    NumericDivergence,
}

impl From<SimFailure> for ScoreFailure {
    fn from(f: SimFailure) -> Self {
        match f {
            SimFailure::DrcFailed => ScoreFailure::DrcFailed,
            SimFailure::Timeout => ScoreFailure::Timeout,
            SimFailure::NumericDivergence => ScoreFailure::NumericDivergence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub challenge: ChallengeKind,
    /// Component rewards in [0, 1], keyed by their reward-code names.
    pub components: BTreeMap<String, f64>,
    pub weights: BTreeMap<String, f64>,
    /// Intermediate quantities (`percent_difference`, `landing_error`, ...).
    pub diagnostics: BTreeMap<String, f64>,
    pub total: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<ScoreFailure>,
}

impl RewardBreakdown {
    /// `Σ weight * component` over the stored maps.
    pub fn recombine(&self) -> f64 {
        self.weights
            .iter()
            .map(|(k, w)| w * self.components.get(k).copied().unwrap_or(0.0))
            .sum()
    }

    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.get(name).copied()
    }

    pub fn percentage(&self) -> f64 {
        render_percentage_score(self)
    }

    fn build(challenge: ChallengeKind, parts: &[(&str, f64, f64)], diagnostics: &[(&str, f64)]) -> RewardBreakdown {
        let total = parts.iter().fold(0.0, |acc, (_, w, c)| acc + w * c);
        RewardBreakdown {
            challenge,
            components: parts.iter().map(|(n, _, c)| (n.to_string(), *c)).collect(),
            weights: parts.iter().map(|(n, w, _)| (n.to_string(), *w)).collect(),
            diagnostics: diagnostics.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
            total,
            failure: None,
        }
    }

    fn failed(mut self, failure: SimFailure) -> RewardBreakdown {
        for v in self.components.values_mut() {
            *v = 0.0;
        }
        self.diagnostics.clear();
        self.total = 0.0;
        self.failure = Some(failure.into());
        self
    }
}

fn clamp_low(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

fn cost_reward(total_cost: f64, scale: f64) -> f64 {
    clamp_low(1.0 - total_cost / scale)
}

fn impact_reward(impact_velocity: f64, scale: f64) -> f64 {
    clamp_low(1.0 - impact_velocity.abs() / scale)
}

pub fn score_altitude(outcome: &FlightOutcome, spec: &AltitudeChallengeSpec) -> RewardBreakdown {
    let w = &spec.weights;
    let percent_difference = (outcome.apogee - spec.target_apogee).abs() / spec.target_apogee;
    let distance_reward = clamp_low(1.0 - percent_difference);
    let structural_failure_reward = if outcome.structural_failure { 0.0 } else { 1.0 };
    let max_horz_distance = spec.target_apogee * spec.horz_scale_factor;
    let horz_distance_reward = clamp_low(1.0 - outcome.horizontal_distance / max_horz_distance);
    let cost = cost_reward(outcome.total_cost, spec.max_cost_scale);
    let impact = impact_reward(outcome.impact_velocity, spec.max_impact_velocity);
    let b = RewardBreakdown::build(
        ChallengeKind::Altitude,
        &[
            ("distance_reward", w.distance, distance_reward),
            ("horz_distance_reward", w.drift, horz_distance_reward),
            ("cost_reward", w.cost, cost),
            ("impact_reward", w.impact, impact),
            ("structural_failure_reward", w.structural, structural_failure_reward),
        ],
        &[
            ("percent_difference", percent_difference),
            ("max_horz_distance", max_horz_distance),
        ],
    );
    match outcome.failure {
        Some(f) => b.failed(f),
        None => b,
    }
}

pub fn score_landing(outcome: &FlightOutcome, spec: &LandingChallengeSpec) -> RewardBreakdown {
    let w = &spec.weights;
    let landing_error =
        ((outcome.landing_x - spec.target_x).powi(2) + (outcome.landing_y - spec.target_y).powi(2)).sqrt();
    let target_distance = (spec.target_x.powi(2) + spec.target_y.powi(2)).sqrt();
    let landing_error_percent = landing_error / target_distance;
    let landing_reward = clamp_low(1.0 - landing_error_percent);
    let structural_failure_reward = if outcome.structural_failure { 0.0 } else { 1.0 };
    let cost = cost_reward(outcome.total_cost, spec.max_cost_scale);
    let impact = impact_reward(outcome.impact_velocity, spec.max_impact_velocity);
    let b = RewardBreakdown::build(
        ChallengeKind::Landing,
        &[
            ("landing_reward", w.landing, landing_reward),
            ("structural_failure_reward", w.structural, structural_failure_reward),
            ("cost_reward", w.cost, cost),
            ("impact_reward", w.impact, impact),
        ],
        &[
            ("landing_error", landing_error),
            ("target_distance", target_distance),
            ("landing_error_percent", landing_error_percent),
        ],
    );
    match outcome.failure {
        Some(f) => b.failed(f),
        None => b,
    }
}

pub fn score(outcome: &FlightOutcome, challenge: &Challenge) -> RewardBreakdown {
    match challenge {
        Challenge::Altitude(s) => score_altitude(outcome, s),
        Challenge::Landing(s) => score_landing(outcome, s),
    }
}

/// `total * 100` rounded to two decimals.
pub fn render_percentage_score(breakdown: &RewardBreakdown) -> f64 {
    (breakdown.total * 100.0 * 100.0).round() / 100.0
}
