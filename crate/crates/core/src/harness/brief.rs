//! The task prompt agents receive.

use super::task::TaskSpec;
use crate::catalog::Catalog;
use crate::design::EXAMPLE_DESIGN_PY;
use crate::scoring::{AltitudeChallengeSpec, Challenge, LandingChallengeSpec};
use crate::sim::compass_name;

const TEMPLATE: &str = include_str!("../../data/brief_template.md");

const ALTITUDE_SCORED_ON: &str = "Distance to max apogee
Cost: Cheaper the rocket the better the score
Does it land safely (less than 5 m/s)
Does it not break
Horz distance: How far is it from the intial launch site
";

const LANDING_SCORED_ON: &str = "Distance from the landing target
Cost: Cheaper the rocket the better the score
Does it land safely (less than 5 m/s)
Does it not break
";

/// Renders the prompt with the task's parameters and the catalog's tables.
pub fn render_task_brief(task: &TaskSpec, catalog: &Catalog) -> String {
    let wind = &task.environment.wind;
    let wind_line = format!(
        "- **Wind Conditions**: {} m/s from {} direction",
        wind.speed,
        compass_name(wind.from_deg)
    );
    let (requirements, scored_on, code, goal) = match &task.challenge {
        Challenge::Altitude(s) => (
            format!("- **Target Apogee**: {:?} meters\n{wind_line}", s.target_apogee),
            ALTITUDE_SCORED_ON,
            altitude_code(s),
            "design a rocket that will reach the target apogee.",
        ),
        Challenge::Landing(s) => (
            format!(
                "- **Target Landing Point**: x = {:?} m (East), y = {:?} m (North) from the launch site\n{wind_line}",
                s.target_x, s.target_y
            ),
            LANDING_SCORED_ON,
            landing_code(s),
            "design a rocket that will land at the target point.",
        ),
    };
    let materials: Vec<&str> = catalog.materials().iter().map(|m| m.name.as_str()).collect();
    let example_start = TEMPLATE.find("config = {\n    \"motor_choice\": \"CesaroniO5800\"");
    let mut out = TEMPLATE.to_string();
    // The worked example always comes from the shipped data file.
    if let Some(start) = example_start {
        let end = start + out[start..].find("\n```").expect("example block is fenced");
        out.replace_range(start..end, EXAMPLE_DESIGN_PY.trim_end());
    }
    out.replace("{{requirements}}", &requirements)
        .replace("{{scored_on}}\n", scored_on)
        .replace("{{score_code}}", &code)
        .replace("{{materials}}", &materials.join(", "))
        .replace("{{motor_table}}", catalog.motors_table().trim_end())
        .replace("{{design_goal}}", goal)
}

fn altitude_code(s: &AltitudeChallengeSpec) -> String {
    let w = &s.weights;
    format!(
        "structural_failure = None  # Whether the rocket structure failed during flight
distance_reward = 1.0 - percent_difference
distance_reward = max(0, distance_reward)




# Structural failure reward
structural_failure_reward = 0 if structural_failure else 1

# Horizontal distance reward (linear version)
max_horz_distance = target_apogee * {}  # Scale factor
horz_distance_reward = max(0, 1 - horizontal_distance / max_horz_distance)

{}
# Add additional rewards with weights
reward = (distance_reward*{} +
            horz_distance_reward * {} +
            cost_reward * {} +
            impact_reward * {} +
            structural_failure_reward * {})",
        s.horz_scale_factor,
        cost_and_impact(s.max_cost_scale, s.max_impact_velocity),
        w.distance,
        w.drift,
        w.cost,
        w.impact,
        w.structural
    )
}

fn landing_code(s: &LandingChallengeSpec) -> String {
    let w = &s.weights;
    format!(
        "structural_failure = None  # Whether the rocket structure failed during flight
target_x = {:?}  # m East of the launch site
target_y = {:?}  # m North of the launch site
landing_error = ((landing_x - target_x)**2 + (landing_y - target_y)**2) ** 0.5
target_distance = (target_x**2 + target_y**2) ** 0.5
landing_error_percent = landing_error / target_distance
landing_reward = max(0, 1.0 - landing_error_percent)

# Structural failure reward
structural_failure_reward = 0 if structural_failure else 1

{}
# Add additional rewards with weights
reward = (landing_reward * {} +
            structural_failure_reward * {} +
            cost_reward * {} +
            impact_reward * {})",
        s.target_x,
        s.target_y,
        cost_and_impact(s.max_cost_scale, s.max_impact_velocity),
        w.landing,
        w.structural,
        w.cost,
        w.impact
    )
}

fn cost_and_impact(max_cost: f64, max_impact: f64) -> String {
    format!(
        "# Cost reward (linear version)
max_cost = {max_cost:?}  # Base cost scale
cost_factor = total_cost / max_cost
cost_reward = 1.0 - cost_factor
cost_reward = max(0, cost_reward)  # Clamp to minimum of 0

# Impact velocity reward (linear version)
max_impact_velocity = {max_impact}  # m/s
impact_factor = abs(impact_velocity) / max_impact_velocity
impact_reward = 1.0 - impact_factor
impact_reward = max(0, impact_reward)  # Clamp to minimum of 0
"
    )
}
