use serde::{Deserialize, Serialize};

use super::{parse_design, ParseErrorKind, RocketDesign, Trigger};
use crate::catalog::Catalog;

/// Minimum allowed gap between the tail's top and bottom radius.
pub const TAIL_RADIUS_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrcRule {
    /// The document could not be parsed into a design.
    Schema,
    NoseKind,
    UnknownMotor,
    UnknownMaterial,
    BodyRadius,
    BodyLength,
    WallThickness,
    TailRadii,
    PositiveDimension,
    FinGeometry,
    Parachute,
    LaunchAngles,
    Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: DrcRule,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrcReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl DrcReport {
    /// A single schema (or nose-kind) violation for text that never parsed.
    pub fn from_parse_error(err: &super::DesignParseError) -> DrcReport {
        DrcReport::from_violations(vec![parse_violation(err)])
    }

    fn from_violations(violations: Vec<Violation>) -> DrcReport {
        DrcReport {
            passed: violations.is_empty(),
            violations,
        }
    }

    pub fn has(&self, rule: DrcRule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    /// One violation per line, `rule: message`.
    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(|v| {
                format!(
                    "{}: {}",
                    serde_json::to_value(v.rule).unwrap().as_str().unwrap(),
                    v.message
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Checks every rule and reports all violations.
pub fn run_drc(design: &RocketDesign, catalog: &Catalog) -> DrcReport {
    let mut out = Vec::new();
    let mut push = |rule, message: String| out.push(Violation { rule, message });

    let body = &design.rocket_body;
    let nose = &design.aerodynamics.nose_cone;
    let fins = &design.aerodynamics.fins;
    let tail = &design.aerodynamics.tail;

    match catalog.lookup_motor(&design.motor_choice) {
        Ok(motor) => {
            if !(body.radius > motor.radius) {
                push(
                    DrcRule::BodyRadius,
                    format!(
                        "body radius must exceed motor radius: body {} m, {} radius {} m",
                        body.radius, motor.name, motor.radius
                    ),
                );
            }
            if !(body.length > motor.length) {
                push(
                    DrcRule::BodyLength,
                    format!(
                        "body length must exceed motor length: body {} m, {} length {} m",
                        body.length, motor.name, motor.length
                    ),
                );
            }
        }
        Err(_) => push(
            DrcRule::UnknownMotor,
            format!(
                "unknown motor `{}`; choose one of: {}",
                design.motor_choice,
                catalog
                    .motors()
                    .iter()
                    .map(|m| m.name.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        ),
    }

    for (part, material) in [
        ("rocket_body", &body.material),
        ("nose_cone", &nose.material),
        ("fins", &fins.material),
        ("tail", &tail.material),
    ] {
        if catalog.lookup_material(material).is_err() {
            push(
                DrcRule::UnknownMaterial,
                format!(
                    "{part} material `{material}` must be exactly one of: {}",
                    catalog
                        .materials()
                        .iter()
                        .map(|m| m.name.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            );
        }
    }

    let dims = [
        ("rocket_body.radius", body.radius),
        ("rocket_body.length", body.length),
        ("rocket_body.thickness", body.thickness),
        ("nose_cone.length", nose.length),
        ("fins.root_chord", fins.root_chord),
        ("fins.tip_chord", fins.tip_chord),
        ("fins.span", fins.span),
        ("fins.thickness", fins.thickness),
        ("tail.length", tail.length),
        ("tail.top_radius", tail.top_radius),
        ("tail.bottom_radius", tail.bottom_radius),
        ("launch.rail_length", design.launch.rail_length),
    ];
    for (name, value) in dims {
        if !(value > 0.0) || !value.is_finite() {
            push(
                DrcRule::PositiveDimension,
                format!("{name} must be a positive length, got {value}"),
            );
        }
    }

    if body.thickness > 0.0 && !(body.thickness < body.radius) {
        push(
            DrcRule::WallThickness,
            format!(
                "wall thickness {} m must be smaller than body radius {} m",
                body.thickness, body.radius
            ),
        );
    }

    if (tail.top_radius - tail.bottom_radius).abs() <= TAIL_RADIUS_EPSILON {
        push(
            DrcRule::TailRadii,
            format!(
                "tail top and bottom radius cannot be the same (both {} m)",
                tail.top_radius
            ),
        );
    }

    if fins.number < 2 {
        push(
            DrcRule::FinGeometry,
            format!("at least 2 fins are required, got {}", fins.number),
        );
    }
    if fins.tip_chord > fins.root_chord {
        push(
            DrcRule::FinGeometry,
            format!(
                "fin tip chord {} m must not exceed root chord {} m",
                fins.tip_chord, fins.root_chord
            ),
        );
    }
    if !fins.cant_angle.is_finite() || fins.cant_angle.abs() >= 90.0 {
        push(
            DrcRule::FinGeometry,
            format!("fin cant angle {} deg is out of range", fins.cant_angle),
        );
    }

    for (which, chute) in [("main", &design.parachutes.main), ("drogue", &design.parachutes.drogue)] {
        if !(chute.cd_s >= 0.0) {
            push(
                DrcRule::Parachute,
                format!("{which} cd_s must be non-negative, got {}", chute.cd_s),
            );
        }
        if let Trigger::Altitude(h) = chute.trigger {
            if !(h > 0.0) {
                push(
                    DrcRule::Parachute,
                    format!("{which} trigger altitude must be positive, got {h}"),
                );
            }
        }
        if !(chute.lag >= 0.0) {
            push(
                DrcRule::Parachute,
                format!("{which} lag must be non-negative, got {}", chute.lag),
            );
        }
        if !(chute.sampling_rate > 0.0) {
            push(
                DrcRule::Parachute,
                format!("{which} sampling_rate must be positive, got {}", chute.sampling_rate),
            );
        }
    }

    let launch = &design.launch;
    if !(launch.inclination > 0.0 && launch.inclination <= 90.0) {
        push(
            DrcRule::LaunchAngles,
            format!("inclination must be in (0, 90] degrees, got {}", launch.inclination),
        );
    }
    if !(launch.heading >= 0.0 && launch.heading < 360.0) {
        push(
            DrcRule::LaunchAngles,
            format!("heading must be in [0, 360) degrees, got {}", launch.heading),
        );
    }

    if !(design.payload.mass >= 0.0) {
        push(
            DrcRule::Payload,
            format!("payload mass must be non-negative, got {}", design.payload.mass),
        );
    }
    if !design.payload.position.is_finite() {
        push(DrcRule::Payload, "payload position must be finite".into());
    }

    DrcReport::from_violations(out)
}

/// Parses a JSON document and runs the rule set. Parse failures become a
/// single violation (`nose_kind` for an unknown nose token, else `schema`).
pub fn check_document(text: &str, catalog: &Catalog) -> (Option<RocketDesign>, DrcReport) {
    match parse_design(text) {
        Ok(design) => {
            let report = run_drc(&design, catalog);
            (Some(design), report)
        }
        Err(err) => (None, DrcReport::from_violations(vec![parse_violation(&err)])),
    }
}

pub(crate) fn parse_violation(err: &super::DesignParseError) -> Violation {
    let rule = if err.kind == ParseErrorKind::UnknownVariant && err.path.ends_with("nose_cone.kind") {
        DrcRule::NoseKind
    } else {
        DrcRule::Schema
    };
    Violation {
        rule,
        message: err.to_string(),
    }
}
