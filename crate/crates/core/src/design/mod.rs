//! Rocket design configuration, its JSON wire form, and design rule checks.
//!
//! The wire schema mirrors the configuration dictionary agents are asked to
//! produce: `motor_choice`, `rocket_body`, `aerodynamics.{nose_cone, fins,
//! tail}`, `parachutes.{main, drogue}`, `launch` and `payload`. All values
//! are SI (metres, kilograms, degrees for angles). Unknown keys are rejected.

mod drc;
mod literal;

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use drc::{check_document, run_drc, DrcReport, DrcRule, Violation};
pub use literal::{extract_config_block, python_literal_to_json, LiteralError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RocketDesign {
    pub motor_choice: String,
    pub rocket_body: BodyTube,
    pub aerodynamics: Aerodynamics,
    pub parachutes: ParachutePair,
    pub launch: LaunchSetup,
    pub payload: PointPayload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyTube {
    pub radius: f64,
    pub length: f64,
    pub material: String,
    pub thickness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aerodynamics {
    pub nose_cone: NoseCone,
    pub fins: FinSet,
    pub tail: TailCone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NoseKind {
    #[serde(rename = "conical")]
    Conical,
    #[serde(rename = "ogive")]
    Ogive,
    #[serde(rename = "elliptical")]
    Elliptical,
    #[serde(rename = "tangent")]
    Tangent,
    #[serde(rename = "von karman")]
    VonKarman,
    #[serde(rename = "parabolic")]
    Parabolic,
    #[serde(rename = "powerseries")]
    PowerSeries,
    #[serde(rename = "lvhaack")]
    LvHaack,
}

impl NoseKind {
    pub const ALL: [NoseKind; 8] = [
        NoseKind::Conical,
        NoseKind::Ogive,
        NoseKind::Elliptical,
        NoseKind::Tangent,
        NoseKind::VonKarman,
        NoseKind::Parabolic,
        NoseKind::PowerSeries,
        NoseKind::LvHaack,
    ];

    pub fn token(self) -> &'static str {
        match self {
            NoseKind::Conical => "conical",
            NoseKind::Ogive => "ogive",
            NoseKind::Elliptical => "elliptical",
            NoseKind::Tangent => "tangent",
            NoseKind::VonKarman => "von karman",
            NoseKind::Parabolic => "parabolic",
            NoseKind::PowerSeries => "powerseries",
            NoseKind::LvHaack => "lvhaack",
        }
    }
}

impl fmt::Display for NoseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoseCone {
    pub kind: NoseKind,
    pub length: f64,
    pub material: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinSet {
    pub number: u32,
    pub root_chord: f64,
    pub tip_chord: f64,
    pub span: f64,
    /// Degrees. Inert for the point-mass trajectory.
    pub cant_angle: f64,
    pub material: String,
    pub thickness: f64,
}

impl FinSet {
    /// Planform area of one trapezoidal fin.
    pub fn planform_area(&self) -> f64 {
        0.5 * (self.root_chord + self.tip_chord) * self.span
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailCone {
    pub length: f64,
    pub top_radius: f64,
    pub bottom_radius: f64,
    pub material: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trigger {
    Apogee,
    /// Metres above ground, fires while descending.
    Altitude(f64),
}

impl Serialize for Trigger {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Trigger::Apogee => serializer.serialize_str("apogee"),
            Trigger::Altitude(h) => serializer.serialize_f64(*h),
        }
    }
}

impl<'de> Deserialize<'de> for Trigger {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct TriggerVisitor;

        impl de::Visitor<'_> for TriggerVisitor {
            type Value = Trigger;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"apogee\" or an altitude in metres")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Trigger, E> {
                if v == "apogee" {
                    Ok(Trigger::Apogee)
                } else {
                    Err(E::unknown_variant(v, &["apogee"]))
                }
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Trigger, E> {
                Ok(Trigger::Altitude(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Trigger, E> {
                Ok(Trigger::Altitude(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Trigger, E> {
                Ok(Trigger::Altitude(v as f64))
            }
        }

        deserializer.deserialize_any(TriggerVisitor)
    }
}

/// One recovery parachute. `sampling_rate`, `lag` and `noise` mirror the
/// configuration schema; the simulator honours `lag` (inflation delay after
/// the trigger) and stores the other two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parachute {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub cd_s: f64,
    pub trigger: Trigger,
    pub sampling_rate: f64,
    pub lag: f64,
    /// (bias, standard deviation, correlation)
    pub noise: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParachutePair {
    pub main: Parachute,
    pub drogue: Parachute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaunchSetup {
    pub rail_length: f64,
    /// Degrees above horizontal; 90 is vertical.
    pub inclination: f64,
    /// Compass degrees, 0 = North, 90 = East.
    pub heading: f64,
}

/// Point mass carried inside the body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointPayload {
    pub mass: f64,
    /// Metres from the body centre, positive toward the nose.
    pub position: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseErrorKind {
    /// Not well-formed JSON / literal syntax.
    Syntax,
    /// A required field is absent.
    MissingField,
    /// A token outside an enumerated set (nose kind, trigger).
    UnknownVariant,
    /// A key not in the schema.
    UnknownField,
    /// Wrong value type.
    InvalidType,
    /// No configuration block found in free text.
    NoConfig,
}

/// Parse failure with the dotted path of the offending field.
#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[error("{}{message}", if path.is_empty() { String::new() } else { format!("at `{path}`: ") })]
pub struct DesignParseError {
    pub kind: ParseErrorKind,
    pub path: String,
    pub message: String,
}

impl DesignParseError {
    fn from_path_error(err: serde_path_to_error::Error<serde_json::Error>) -> DesignParseError {
        let mut path = err.path().to_string();
        if path == "." {
            path.clear();
        }
        let inner = err.into_inner();
        let message = inner.to_string();
        let kind = if inner.is_syntax() || inner.is_eof() {
            ParseErrorKind::Syntax
        } else if let Some(field) = backticked(&message, "missing field `") {
            if path.is_empty() {
                path = field;
            } else {
                path = format!("{path}.{field}");
            }
            ParseErrorKind::MissingField
        } else if message.starts_with("unknown variant") {
            ParseErrorKind::UnknownVariant
        } else if message.starts_with("unknown field") {
            ParseErrorKind::UnknownField
        } else {
            ParseErrorKind::InvalidType
        };
        // serde_json appends " at line L column C"; the path is more useful.
        let message = match message.rfind(" at line ") {
            Some(i) if kind != ParseErrorKind::Syntax => message[..i].to_string(),
            _ => message,
        };
        DesignParseError { kind, path, message }
    }
}

fn backticked(message: &str, prefix: &str) -> Option<String> {
    let rest = message.strip_prefix(prefix)?;
    let end = rest.find('`')?;
    Some(rest[..end].to_string())
}

/// Strict JSON parse of a design document.
pub fn parse_design(text: &str) -> Result<RocketDesign, DesignParseError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let design: RocketDesign = serde_path_to_error::deserialize(&mut de).map_err(DesignParseError::from_path_error)?;
    de.end().map_err(|e| DesignParseError {
        kind: ParseErrorKind::Syntax,
        path: String::new(),
        message: e.to_string(),
    })?;
    Ok(design)
}

/// Builds a design from an already-parsed JSON value.
pub fn design_from_value(value: serde_json::Value) -> Result<RocketDesign, DesignParseError> {
    serde_path_to_error::deserialize(value).map_err(DesignParseError::from_path_error)
}

/// Tolerant parse of free agent text: locates the first fenced block (or the
/// first `{...}` in the text), converts Python literal syntax to JSON, then
/// parses strictly. Inline arithmetic is rejected.
pub fn parse_agent_output(text: &str) -> Result<RocketDesign, DesignParseError> {
    let block = extract_config_block(text).ok_or_else(|| DesignParseError {
        kind: ParseErrorKind::NoConfig,
        path: String::new(),
        message: "no configuration dictionary found in the response".into(),
    })?;
    let value = python_literal_to_json(block).map_err(|e| DesignParseError {
        kind: ParseErrorKind::Syntax,
        path: String::new(),
        message: e.to_string(),
    })?;
    design_from_value(value)
}

impl RocketDesign {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("design serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("design serializes")
    }

    /// The example configuration shown in the task brief.
    pub fn example() -> RocketDesign {
        parse_design(EXAMPLE_DESIGN_JSON).expect("example design parses")
    }

    /// Nose + body + tail.
    pub fn overall_length(&self) -> f64 {
        self.aerodynamics.nose_cone.length + self.rocket_body.length + self.aerodynamics.tail.length
    }
}

/// The example design, as JSON.
pub const EXAMPLE_DESIGN_JSON: &str = include_str!("../../data/example_design.json");
/// The same design as the Python literal agents are shown.
pub const EXAMPLE_DESIGN_PY: &str = include_str!("../../data/example_design.py");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_design_echoes_every_field() {
        let d = RocketDesign::example();
        assert_eq!(d.motor_choice, "CesaroniO5800");
        assert_eq!(d.rocket_body.radius, 0.1);
        assert_eq!(d.rocket_body.length, 1.2);
        assert_eq!(d.rocket_body.material, "fiberglass");
        assert_eq!(d.rocket_body.thickness, 0.01);
        assert_eq!(d.aerodynamics.nose_cone.kind, NoseKind::Ogive);
        assert_eq!(d.aerodynamics.nose_cone.length, 0.3);
        assert_eq!(d.aerodynamics.nose_cone.material, "composite");
        let f = &d.aerodynamics.fins;
        assert_eq!(
            (f.number, f.root_chord, f.tip_chord, f.span, f.cant_angle, f.thickness),
            (4, 0.15, 0.075, 0.3, 0.5, 0.005)
        );
        assert_eq!(f.material, "carbon_fiber");
        let t = &d.aerodynamics.tail;
        assert_eq!((t.length, t.top_radius, t.bottom_radius), (1.2, 0.04, 0.05));
        assert_eq!(d.parachutes.main.cd_s, 0.25);
        assert_eq!(d.parachutes.drogue.cd_s, 0.2);
        assert_eq!(d.parachutes.main.trigger, Trigger::Apogee);
        assert_eq!(d.parachutes.main.noise, [0.0, 8.3, 0.5]);
        assert_eq!(d.parachutes.main.name.as_deref(), Some("Main"));
        assert_eq!(d.launch.rail_length, 1.2);
        assert_eq!(d.launch.inclination, 90.0);
        assert_eq!(d.launch.heading, 0.0);
        assert_eq!(d.payload.mass, 0.5);
        assert_eq!(d.payload.position, 0.6);
    }

    #[test]
    fn missing_drogue_names_path() {
        let mut v: serde_json::Value = serde_json::from_str(EXAMPLE_DESIGN_JSON).unwrap();
        v["parachutes"].as_object_mut().unwrap().remove("drogue");
        let err = parse_design(&v.to_string()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingField);
        assert_eq!(err.path, "parachutes.drogue");
    }

    #[test]
    fn nose_kind_tokens_are_exact() {
        let text = EXAMPLE_DESIGN_JSON.replace("\"ogive\"", "\"Ogive\"");
        let err = parse_design(&text).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownVariant);
        assert_eq!(err.path, "aerodynamics.nose_cone.kind");
        for kind in NoseKind::ALL {
            let text = EXAMPLE_DESIGN_JSON.replace("\"ogive\"", &format!("\"{}\"", kind.token()));
            assert_eq!(parse_design(&text).unwrap().aerodynamics.nose_cone.kind, kind);
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = EXAMPLE_DESIGN_JSON.replacen("\"radius\": 0.1", "\"radius\": 0.1, \"colour\": \"red\"", 1);
        let err = parse_design(&text).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownField);
        assert_eq!(err.path, "rocket_body.colour");
    }

    #[test]
    fn numeric_trigger() {
        let text = EXAMPLE_DESIGN_JSON.replacen("\"apogee\"", "450", 1);
        let d = parse_design(&text).unwrap();
        assert_eq!(d.parachutes.main.trigger, Trigger::Altitude(450.0));
        assert_eq!(parse_design(&d.to_json()).unwrap(), d);
        let bad = EXAMPLE_DESIGN_JSON.replacen("\"apogee\"", "\"burnout\"", 1);
        assert_eq!(parse_design(&bad).unwrap_err().kind, ParseErrorKind::UnknownVariant);
    }

    #[test]
    fn trailing_garbage_is_a_syntax_error() {
        let err = parse_design(&format!("{EXAMPLE_DESIGN_JSON} x")).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
    }

    #[test]
    fn agent_output_in_python_syntax() {
        let text = format!(
            "Reasoning first.\n\n```python\n{}\n```\nDone.",
            include_str!("../../data/example_design.py")
        );
        assert_eq!(parse_agent_output(&text).unwrap(), RocketDesign::example());
    }

    #[test]
    fn agent_output_without_block() {
        let err = parse_agent_output("I would pick a big motor.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NoConfig);
    }
}
