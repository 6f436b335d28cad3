//! Flat numeric encoding of a design for the search algorithms.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::design::{NoseKind, RocketDesign, Trigger};

/// Extra body radius over the motor radius that repair leaves, metres.
pub const RADIUS_MARGIN: f64 = 0.002;
/// Extra body length over the motor length that repair leaves, metres.
pub const LENGTH_MARGIN: f64 = 0.01;
/// Smallest difference repair leaves between tail top and bottom radius.
pub const TAIL_RADIUS_GAP: f64 = 0.001;
const MIN_FINS: u32 = 2;
const MAX_FINS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DimKind {
    Continuous {
        lo: f64,
        hi: f64,
    },
    /// Index into `n` options, stored as a real number.
    Categorical {
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dim {
    pub name: &'static str,
    pub kind: DimKind,
}

impl Dim {
    /// Clamp a continuous value; round then clamp a categorical index.
    pub fn repair(&self, x: f64) -> f64 {
        let x = if x.is_nan() { 0.0 } else { x };
        match self.kind {
            DimKind::Continuous { lo, hi } => x.clamp(lo, hi),
            DimKind::Categorical { n } => x.round().clamp(0.0, (n - 1) as f64),
        }
    }

    pub fn width(&self) -> f64 {
        match self.kind {
            DimKind::Continuous { lo, hi } => hi - lo,
            DimKind::Categorical { n } => n as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DesignVector(pub Vec<f64>);

mod ix {
    pub const MOTOR: usize = 0;
    pub const BODY_MATERIAL: usize = 1;
    pub const NOSE_KIND: usize = 2;
    pub const NOSE_MATERIAL: usize = 3;
    pub const FIN_MATERIAL: usize = 4;
    pub const TAIL_MATERIAL: usize = 5;
    pub const FIN_COUNT: usize = 6;
    pub const MAIN_TRIGGER: usize = 7;
    pub const DROGUE_TRIGGER: usize = 8;
    pub const BODY_RADIUS: usize = 9;
    pub const BODY_LENGTH: usize = 10;
    pub const BODY_THICKNESS: usize = 11;
    pub const NOSE_LENGTH: usize = 12;
    pub const ROOT_CHORD: usize = 13;
    pub const TIP_CHORD: usize = 14;
    pub const SPAN: usize = 15;
    pub const CANT: usize = 16;
    pub const FIN_THICKNESS: usize = 17;
    pub const TAIL_LENGTH: usize = 18;
    pub const TAIL_TOP: usize = 19;
    pub const TAIL_BOTTOM: usize = 20;
    pub const MAIN_CDS: usize = 21;
    pub const MAIN_LAG: usize = 22;
    pub const MAIN_ALTITUDE: usize = 23;
    pub const DROGUE_CDS: usize = 24;
    pub const DROGUE_LAG: usize = 25;
    pub const DROGUE_ALTITUDE: usize = 26;
    pub const RAIL: usize = 27;
    pub const INCLINATION: usize = 28;
    pub const HEADING: usize = 29;
    pub const PAYLOAD_MASS: usize = 30;
    pub const PAYLOAD_POSITION: usize = 31;
    pub const COUNT: usize = 32;
}

/// Altitude stored for an apogee trigger so the slot has a defined value.
const UNUSED_TRIGGER_ALTITUDE: f64 = 300.0;

#[derive(Debug, Clone)]
struct MotorFit {
    name: String,
    radius: f64,
    length: f64,
}

/// Search box over designs. Fields the simulator ignores (parachute names,
/// sampling rate, noise) are copied from a template design.
#[derive(Debug, Clone)]
pub struct DesignSpace {
    dims: Vec<Dim>,
    motors: Vec<MotorFit>,
    materials: Vec<String>,
    template: RocketDesign,
}

impl DesignSpace {
    pub fn new(catalog: &Catalog) -> DesignSpace {
        DesignSpace::with_template(catalog, RocketDesign::example())
    }

    pub fn with_template(catalog: &Catalog, template: RocketDesign) -> DesignSpace {
        let motors: Vec<MotorFit> = catalog
            .motors()
            .iter()
            .map(|m| MotorFit {
                name: m.name.clone(),
                radius: m.radius,
                length: m.length,
            })
            .collect();
        let materials: Vec<String> = catalog.materials().iter().map(|m| m.name.clone()).collect();
        let cat = |name, n| Dim {
            name,
            kind: DimKind::Categorical { n },
        };
        let cont = |name, lo, hi| Dim {
            name,
            kind: DimKind::Continuous { lo, hi },
        };
        let nm = materials.len();
        let dims = vec![
            cat("motor_choice", motors.len()),
            cat("rocket_body.material", nm),
            cat("nose_cone.kind", NoseKind::ALL.len()),
            cat("nose_cone.material", nm),
            cat("fins.material", nm),
            cat("tail.material", nm),
            cat("fins.number", (MAX_FINS - MIN_FINS + 1) as usize),
            cat("parachutes.main.trigger", 2),
            cat("parachutes.drogue.trigger", 2),
            cont("rocket_body.radius", 0.02, 0.3),
            cont("rocket_body.length", 0.2, 5.0),
            cont("rocket_body.thickness", 0.0005, 0.05),
            cont("nose_cone.length", 0.05, 2.0),
            cont("fins.root_chord", 0.01, 0.8),
            cont("fins.tip_chord", 0.005, 0.6),
            cont("fins.span", 0.01, 0.6),
            cont("fins.cant_angle", 0.0, 5.0),
            cont("fins.thickness", 0.0005, 0.03),
            cont("tail.length", 0.02, 2.5),
            cont("tail.top_radius", 0.005, 0.3),
            cont("tail.bottom_radius", 0.005, 0.3),
            cont("parachutes.main.cd_s", 0.0, 30.0),
            cont("parachutes.main.lag", 0.0, 5.0),
            cont("parachutes.main.trigger_altitude", 30.0, 5000.0),
            cont("parachutes.drogue.cd_s", 0.0, 10.0),
            cont("parachutes.drogue.lag", 0.0, 5.0),
            cont("parachutes.drogue.trigger_altitude", 30.0, 5000.0),
            cont("launch.rail_length", 0.5, 10.0),
            cont("launch.inclination", 60.0, 90.0),
            cont("launch.heading", 0.0, 359.9),
            cont("payload.mass", 0.0, 20.0),
            cont("payload.position", -2.0, 2.0),
        ];
        debug_assert_eq!(dims.len(), ix::COUNT);
        DesignSpace {
            dims,
            motors,
            materials,
            template,
        }
    }

    pub fn dims(&self) -> &[Dim] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Raw values, without clamping. Unknown catalog names encode as -1 and
    /// are repaired to index 0 on decode.
    pub fn encode(&self, d: &RocketDesign) -> DesignVector {
        let mut x = vec![0.0; ix::COUNT];
        let motor = self.motors.iter().position(|m| m.name == d.motor_choice);
        let material = |name: &str| self.materials.iter().position(|m| m == name);
        let index = |i: Option<usize>| i.map_or(-1.0, |i| i as f64);
        let trigger = |t: Trigger| match t {
            Trigger::Apogee => (0.0, UNUSED_TRIGGER_ALTITUDE),
            Trigger::Altitude(h) => (1.0, h),
        };
        let aero = &d.aerodynamics;
        let chutes = &d.parachutes;
        x[ix::MOTOR] = index(motor);
        x[ix::BODY_MATERIAL] = index(material(&d.rocket_body.material));
        x[ix::NOSE_KIND] = index(NoseKind::ALL.iter().position(|k| *k == aero.nose_cone.kind));
        x[ix::NOSE_MATERIAL] = index(material(&aero.nose_cone.material));
        x[ix::FIN_MATERIAL] = index(material(&aero.fins.material));
        x[ix::TAIL_MATERIAL] = index(material(&aero.tail.material));
        x[ix::FIN_COUNT] = aero.fins.number as f64 - MIN_FINS as f64;
        (x[ix::MAIN_TRIGGER], x[ix::MAIN_ALTITUDE]) = trigger(chutes.main.trigger);
        (x[ix::DROGUE_TRIGGER], x[ix::DROGUE_ALTITUDE]) = trigger(chutes.drogue.trigger);
        x[ix::BODY_RADIUS] = d.rocket_body.radius;
        x[ix::BODY_LENGTH] = d.rocket_body.length;
        x[ix::BODY_THICKNESS] = d.rocket_body.thickness;
        x[ix::NOSE_LENGTH] = aero.nose_cone.length;
        x[ix::ROOT_CHORD] = aero.fins.root_chord;
        x[ix::TIP_CHORD] = aero.fins.tip_chord;
        x[ix::SPAN] = aero.fins.span;
        x[ix::CANT] = aero.fins.cant_angle;
        x[ix::FIN_THICKNESS] = aero.fins.thickness;
        x[ix::TAIL_LENGTH] = aero.tail.length;
        x[ix::TAIL_TOP] = aero.tail.top_radius;
        x[ix::TAIL_BOTTOM] = aero.tail.bottom_radius;
        x[ix::MAIN_CDS] = chutes.main.cd_s;
        x[ix::MAIN_LAG] = chutes.main.lag;
        x[ix::DROGUE_CDS] = chutes.drogue.cd_s;
        x[ix::DROGUE_LAG] = chutes.drogue.lag;
        x[ix::RAIL] = d.launch.rail_length;
        x[ix::INCLINATION] = d.launch.inclination;
        x[ix::HEADING] = d.launch.heading;
        x[ix::PAYLOAD_MASS] = d.payload.mass;
        x[ix::PAYLOAD_POSITION] = d.payload.position;
        DesignVector(x)
    }

    /// Clamps every dimension to its bounds, then repairs cross-field rules:
    /// body radius and length clear the motor, wall thinner than the radius,
    /// tip chord no longer than root chord, distinct tail radii.
    pub fn repair(&self, x: &DesignVector) -> DesignVector {
        assert_eq!(x.0.len(), ix::COUNT, "design vector length");
        let mut v: Vec<f64> = x.0.iter().zip(&self.dims).map(|(x, d)| d.repair(*x)).collect();
        let motor = &self.motors[v[ix::MOTOR] as usize];
        v[ix::BODY_RADIUS] = v[ix::BODY_RADIUS].max(motor.radius + RADIUS_MARGIN);
        v[ix::BODY_LENGTH] = v[ix::BODY_LENGTH].max(motor.length + LENGTH_MARGIN);
        v[ix::BODY_THICKNESS] = v[ix::BODY_THICKNESS].min(0.5 * v[ix::BODY_RADIUS]);
        v[ix::TIP_CHORD] = v[ix::TIP_CHORD].min(v[ix::ROOT_CHORD]);
        if (v[ix::TAIL_TOP] - v[ix::TAIL_BOTTOM]).abs() < TAIL_RADIUS_GAP {
            let DimKind::Continuous { hi, .. } = self.dims[ix::TAIL_BOTTOM].kind else {
                unreachable!()
            };
            v[ix::TAIL_BOTTOM] = if v[ix::TAIL_TOP] + TAIL_RADIUS_GAP <= hi {
                v[ix::TAIL_TOP] + TAIL_RADIUS_GAP
            } else {
                v[ix::TAIL_TOP] - TAIL_RADIUS_GAP
            };
        }
        DesignVector(v)
    }

    pub fn decode(&self, x: &DesignVector) -> RocketDesign {
        let v = self.repair(x).0;
        let mut d = self.template.clone();
        let material = |i: usize| self.materials[v[i] as usize].clone();
        let trigger = |kind: usize, alt: usize| {
            if v[kind] == 0.0 {
                Trigger::Apogee
            } else {
                Trigger::Altitude(v[alt])
            }
        };
        d.motor_choice = self.motors[v[ix::MOTOR] as usize].name.clone();
        d.rocket_body.radius = v[ix::BODY_RADIUS];
        d.rocket_body.length = v[ix::BODY_LENGTH];
        d.rocket_body.material = material(ix::BODY_MATERIAL);
        d.rocket_body.thickness = v[ix::BODY_THICKNESS];
        let aero = &mut d.aerodynamics;
        aero.nose_cone.kind = NoseKind::ALL[v[ix::NOSE_KIND] as usize];
        aero.nose_cone.length = v[ix::NOSE_LENGTH];
        aero.nose_cone.material = material(ix::NOSE_MATERIAL);
        aero.fins.number = v[ix::FIN_COUNT] as u32 + MIN_FINS;
        aero.fins.root_chord = v[ix::ROOT_CHORD];
        aero.fins.tip_chord = v[ix::TIP_CHORD];
        aero.fins.span = v[ix::SPAN];
        aero.fins.cant_angle = v[ix::CANT];
        aero.fins.material = material(ix::FIN_MATERIAL);
        aero.fins.thickness = v[ix::FIN_THICKNESS];
        aero.tail.length = v[ix::TAIL_LENGTH];
        aero.tail.top_radius = v[ix::TAIL_TOP];
        aero.tail.bottom_radius = v[ix::TAIL_BOTTOM];
        aero.tail.material = material(ix::TAIL_MATERIAL);
        let chutes = &mut d.parachutes;
        chutes.main.cd_s = v[ix::MAIN_CDS];
        chutes.main.lag = v[ix::MAIN_LAG];
        chutes.main.trigger = trigger(ix::MAIN_TRIGGER, ix::MAIN_ALTITUDE);
        chutes.drogue.cd_s = v[ix::DROGUE_CDS];
        chutes.drogue.lag = v[ix::DROGUE_LAG];
        chutes.drogue.trigger = trigger(ix::DROGUE_TRIGGER, ix::DROGUE_ALTITUDE);
        d.launch.rail_length = v[ix::RAIL];
        d.launch.inclination = v[ix::INCLINATION];
        d.launch.heading = v[ix::HEADING];
        d.payload.mass = v[ix::PAYLOAD_MASS];
        d.payload.position = v[ix::PAYLOAD_POSITION];
        d
    }

    /// Uniform over the box, then repaired.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> RocketDesign {
        self.decode(&self.sample_vector(rng))
    }

    pub fn sample_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> DesignVector {
        DesignVector(
            self.dims
                .iter()
                .map(|d| match d.kind {
                    DimKind::Continuous { lo, hi } => rng.random_range(lo..=hi),
                    DimKind::Categorical { n } => rng.random_range(0..n) as f64,
                })
                .collect(),
        )
    }
}
