//! Point-mass flight simulation.
//!
//! Three translational degrees of freedom with attitude slaved to the
//! air-relative velocity. Phases run on-rail, powered, coast, drogue, main
//! and landed. Integration is fixed-step RK4 (5 ms before apogee, 20 ms
//! after) with every state event (rail exit, apogee, altitude triggers,
//! touchdown) localized by bisection inside the step that crossed it.
//!
//! Frame: x = East, y = North, z = up, origin at the launch pad.

pub mod aero;
pub mod atmosphere;
mod flight;

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aero::DragModel;
pub use atmosphere::{AirState, Atmosphere, AtmosphereModel};
pub use flight::{simulate, simulate_with_cancel, FlightModel};

use crate::catalog::{MotorSpec, G0};

/// Thrust in newtons `t` seconds after ignition.
pub fn thrust_at(motor: &MotorSpec, t: f64) -> f64 {
    motor.thrust_profile().thrust_at(t)
}

/// Constant horizontal wind, described the way forecasts are: speed and the
/// compass direction it blows *from*.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wind {
    pub speed: f64,
    /// Compass degrees: 0 = from North, 90 = from East.
    pub from_deg: f64,
}

impl Wind {
    pub const CALM: Wind = Wind {
        speed: 0.0,
        from_deg: 0.0,
    };

    /// Air velocity vector. Wind from the East blows toward -x.
    pub fn velocity(&self) -> Vector3<f64> {
        let th = self.from_deg.to_radians();
        Vector3::new(-self.speed * th.sin(), -self.speed * th.cos(), 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid wind `{0}`: expected SPEED@DIR, e.g. 5@E or 5@90")]
pub struct WindParseError(pub String);

fn compass_token(token: &str) -> Option<f64> {
    const POINTS: [&str; 16] = [
        "N", "NNE", "NE", "ENE", "E", "ESE", "SE", "SSE", "S", "SSW", "SW", "WSW", "W", "WNW", "NW", "NNW",
    ];
    POINTS
        .iter()
        .position(|p| p.eq_ignore_ascii_case(token))
        .map(|i| i as f64 * 22.5)
}

impl FromStr for Wind {
    type Err = WindParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || WindParseError(s.to_string());
        let (speed, dir) = s.split_once('@').ok_or_else(err)?;
        let speed: f64 = speed.trim().parse().map_err(|_| err())?;
        let dir = dir.trim();
        let from_deg = match compass_token(dir) {
            Some(d) => d,
            None => dir.parse::<f64>().map_err(|_| err())?,
        };
        if !(speed >= 0.0) || !speed.is_finite() || !from_deg.is_finite() {
            return Err(err());
        }
        Ok(Wind {
            speed,
            from_deg: from_deg.rem_euclid(360.0),
        })
    }
}

impl fmt::Display for Wind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} m/s from {}", self.speed, compass_name(self.from_deg))
    }
}

/// `E` for 90, `NE` for 45, otherwise `123.4 deg`.
pub fn compass_name(deg: f64) -> String {
    let idx = deg / 22.5;
    if (idx - idx.round()).abs() < 1e-9 {
        let names = [
            "N", "NNE", "NE", "ENE", "E", "ESE", "SE", "SSE", "S", "SSW", "SW", "WSW", "W", "WNW", "NW", "NNW",
        ];
        names[(idx.round() as usize) % 16].to_string()
    } else {
        format!("{deg} deg")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub wind: Wind,
    #[serde(default)]
    pub atmosphere: AtmosphereModel,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
}

fn default_gravity() -> f64 {
    G0
}

impl Environment {
    pub fn with_wind(wind: Wind) -> Environment {
        Environment {
            wind,
            atmosphere: AtmosphereModel::Isa,
            gravity: G0,
        }
    }

    pub fn calm() -> Environment {
        Environment::with_wind(Wind::CALM)
    }
}

impl Default for Environment {
    fn default() -> Self {
        Environment::calm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimLimits {
    /// Simulated seconds before the flight is abandoned as a timeout.
    pub max_flight_time: f64,
    /// Optional wall-clock budget in seconds. Makes results depend on
    /// machine speed, so it is off by default.
    pub max_wall_time: Option<f64>,
}

impl Default for SimLimits {
    fn default() -> Self {
        SimLimits {
            max_flight_time: 600.0,
            max_wall_time: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSizes {
    /// Rail, powered and coast up to apogee.
    pub ascent: f64,
    /// Everything after apogee.
    pub descent: f64,
    /// Bracket width at which event bisection stops.
    pub event_tolerance: f64,
}

impl Default for StepSizes {
    fn default() -> Self {
        StepSizes {
            ascent: 0.005,
            descent: 0.02,
            event_tolerance: 1e-6,
        }
    }
}

/// Force toggles for oracle checks. All on for real flights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsSwitches {
    pub thrust: bool,
    pub body_drag: bool,
    pub parachutes: bool,
}

impl Default for PhysicsSwitches {
    fn default() -> Self {
        PhysicsSwitches {
            thrust: true,
            body_drag: true,
            parachutes: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPhase {
    /// Free flight, no rail constraint.
    Free,
    /// Drogue already open.
    Drogue,
    /// Main already open.
    Main,
}

/// Starts a flight somewhere other than the pad, motor already spent.
/// Used by oracle probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub phase: StartPhase,
    /// Replaces the design's mass; the mass then stays constant. Defaults to
    /// the burnt-out mass.
    pub mass: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimSettings {
    pub limits: SimLimits,
    pub steps: StepSizes,
    pub physics: PhysicsSwitches,
    pub initial: Option<InitialState>,
    /// Record a time series row per accepted step.
    pub trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlightPhase {
    OnRail,
    Powered,
    Coast,
    Drogue,
    Main,
    Landed,
}

impl FlightPhase {
    pub fn name(self) -> &'static str {
        match self {
            FlightPhase::OnRail => "on_rail",
            FlightPhase::Powered => "powered",
            FlightPhase::Coast => "coast",
            FlightPhase::Drogue => "drogue",
            FlightPhase::Main => "main",
            FlightPhase::Landed => "landed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightState {
    pub time: f64,
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub mass: f64,
    pub phase: FlightPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimFailure {
    DrcFailed,
    Timeout,
    NumericDivergence,
}

impl fmt::Display for SimFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimFailure::DrcFailed => "design rule check failed",
            SimFailure::Timeout => "simulation timed out",
            SimFailure::NumericDivergence => "simulation diverged",
        })
    }
}

/// Flight conditions at the point of maximum dynamic pressure.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MaxQState {
    pub dynamic_pressure: f64,
    pub time: f64,
    pub altitude: f64,
    pub airspeed: f64,
    pub mach: f64,
    pub thrust: f64,
    /// Magnitude of the aerodynamic drag acting at that instant.
    pub drag: f64,
    pub mass: f64,
    pub ambient_pressure: f64,
    pub speed_of_sound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlightEventKind {
    Liftoff,
    RailExit,
    Burnout,
    Apogee,
    DrogueTrigger,
    DrogueDeploy,
    MainTrigger,
    MainDeploy,
    Touchdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightEvent {
    pub kind: FlightEventKind,
    pub time: f64,
    pub altitude: f64,
}

/// Everything the scoring functions consume, plus diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightOutcome {
    /// Metres above ground.
    pub apogee: f64,
    pub apogee_time: Option<f64>,
    pub flight_time: f64,
    pub landing_x: f64,
    pub landing_y: f64,
    pub horizontal_distance: f64,
    /// Speed magnitude at touchdown.
    pub impact_velocity: f64,
    pub rail_exit_velocity: Option<f64>,
    pub max_q: MaxQState,
    pub events: Vec<FlightEvent>,
    /// Filled in by the structural check.
    pub structural_failure: bool,
    /// Filled in by the cost model.
    pub total_cost: f64,
    pub failure: Option<SimFailure>,
}

impl FlightOutcome {
    /// Placeholder outcome for a design that never flew.
    pub fn not_flown(failure: SimFailure) -> FlightOutcome {
        FlightOutcome {
            apogee: 0.0,
            apogee_time: None,
            flight_time: 0.0,
            landing_x: 0.0,
            landing_y: 0.0,
            horizontal_distance: 0.0,
            impact_velocity: 0.0,
            rail_exit_velocity: None,
            max_q: MaxQState::default(),
            events: Vec::new(),
            structural_failure: false,
            total_cost: 0.0,
            failure: Some(failure),
        }
    }

    pub fn event(&self, kind: FlightEventKind) -> Option<&FlightEvent> {
        self.events.iter().find(|e| e.kind == kind)
    }
}

/// One row of the optional trajectory trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub mass: f64,
    pub phase: FlightPhase,
}

/// Writes `t,x,y,z,vx,vy,vz,mass,phase` rows with a header line.
pub fn write_trace_csv<W: std::io::Write>(rows: &[TraceRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "y", "z", "vx", "vy", "vz", "mass", "phase"])?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            r.x.to_string(),
            r.y.to_string(),
            r.z.to_string(),
            r.vx.to_string(),
            r.vy.to_string(),
            r.vz.to_string(),
            r.mass.to_string(),
            r.phase.name().to_string(),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wind_from_east_blows_west() {
        let w: Wind = "5@E".parse().unwrap();
        assert_eq!(w.from_deg, 90.0);
        let v = w.velocity();
        assert!((v.x + 5.0).abs() < 1e-12 && v.y.abs() < 1e-12);
        let w: Wind = "3@0".parse().unwrap();
        assert!((w.velocity().y + 3.0).abs() < 1e-12);
        assert_eq!("7@sw".parse::<Wind>().unwrap().from_deg, 225.0);
        assert!("5E".parse::<Wind>().is_err());
        assert!("-1@E".parse::<Wind>().is_err());
    }

    #[test]
    fn wind_display() {
        assert_eq!("5@E".parse::<Wind>().unwrap().to_string(), "5 m/s from E");
        assert_eq!(compass_name(100.0), "100 deg");
    }

    #[test]
    fn thrust_at_matches_profile() {
        let m = crate::catalog::Catalog::builtin()
            .lookup_motor("AeroTechH128W")
            .unwrap();
        assert_eq!(thrust_at(m, 1.29), 0.0);
        assert_eq!(thrust_at(m, 0.0), 0.0);
    }
}
