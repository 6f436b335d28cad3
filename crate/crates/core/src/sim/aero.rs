//! Component build-up drag model.
//!
//! `Cd = nose pressure + skin friction + fin thickness + base`, referenced to
//! the body cross-section. Pressure terms get a Prandtl-Glauert factor below
//! Mach 0.95; between 0.95 and 1.3 the factor is interpolated down to its
//! supersonic value and a fixed wave-drag penalty is added.

use nalgebra::Vector3;

use crate::design::{NoseKind, RocketDesign};
use crate::geometry;

use super::atmosphere::AirState;

/// Artifact constants; none of these are measured values.
pub mod constants {
    pub const BASE_DRAG: f64 = 0.12;
    /// Multiplies `fins * thickness * span / A_ref`.
    pub const FIN_THICKNESS_FACTOR: f64 = 0.5;
    /// Flat-plate turbulent friction is floored at this Reynolds number.
    pub const MIN_REYNOLDS: f64 = 1.0e5;
    pub const PG_LIMIT_MACH: f64 = 0.95;
    pub const SUPERSONIC_MACH: f64 = 1.3;
    pub const TRANSONIC_WAVE_DRAG: f64 = 0.15;
}

pub fn nose_pressure_drag(kind: NoseKind) -> f64 {
    match kind {
        NoseKind::Conical => 0.20,
        NoseKind::Ogive | NoseKind::Tangent => 0.15,
        NoseKind::VonKarman | NoseKind::LvHaack => 0.12,
        NoseKind::Elliptical | NoseKind::Parabolic | NoseKind::PowerSeries => 0.16,
    }
}

/// Geometry-dependent parts of the drag model, computed once per design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DragModel {
    pub reference_area: f64,
    /// Length used for the Reynolds number.
    pub length: f64,
    nose_pressure: f64,
    fin_thickness: f64,
    wetted_ratio: f64,
}

impl DragModel {
    pub fn new(design: &RocketDesign) -> DragModel {
        let area = geometry::reference_area(design);
        let fins = &design.aerodynamics.fins;
        DragModel {
            reference_area: area,
            length: design.overall_length(),
            nose_pressure: nose_pressure_drag(design.aerodynamics.nose_cone.kind),
            fin_thickness: constants::FIN_THICKNESS_FACTOR * fins.number as f64 * fins.thickness * fins.span / area,
            wetted_ratio: geometry::wetted_area(design) / area,
        }
    }

    fn compressibility(mach: f64) -> (f64, f64) {
        use constants::*;
        let pg = |m: f64| 1.0 / (1.0 - m * m).sqrt();
        let supersonic = |m: f64| (1.0 / (m * m - 1.0).sqrt()).min(pg(PG_LIMIT_MACH));
        if mach < PG_LIMIT_MACH {
            (pg(mach), 0.0)
        } else if mach < SUPERSONIC_MACH {
            let s = (mach - PG_LIMIT_MACH) / (SUPERSONIC_MACH - PG_LIMIT_MACH);
            let f = pg(PG_LIMIT_MACH) + s * (supersonic(SUPERSONIC_MACH) - pg(PG_LIMIT_MACH));
            (f, TRANSONIC_WAVE_DRAG)
        } else {
            (supersonic(mach), 0.0)
        }
    }

    pub fn skin_friction(reynolds: f64) -> f64 {
        0.074 / reynolds.max(constants::MIN_REYNOLDS).powf(0.2)
    }

    /// Drag coefficient at the given Mach and Reynolds numbers.
    pub fn cd(&self, mach: f64, reynolds: f64) -> f64 {
        let (factor, wave) = Self::compressibility(mach);
        (self.nose_pressure + self.fin_thickness) * factor
            + Self::skin_friction(reynolds) * self.wetted_ratio
            + constants::BASE_DRAG
            + wave
    }

    pub fn cd_at(&self, airspeed: f64, air: &AirState) -> f64 {
        let mach = airspeed / air.speed_of_sound;
        let re = air.density * airspeed * self.length / air.dynamic_viscosity;
        self.cd(mach, re)
    }

    /// Body drag for air-relative velocity `v_rel` (rocket minus wind).
    pub fn body_drag(&self, v_rel: &Vector3<f64>, air: &AirState) -> Vector3<f64> {
        let speed = v_rel.norm();
        if speed == 0.0 {
            return Vector3::zeros();
        }
        -0.5 * air.density * speed * self.cd_at(speed, air) * self.reference_area * v_rel
    }
}

/// Drag of an open parachute; `cd_s` replaces `Cd * A`.
pub fn parachute_drag(cd_s: f64, v_rel: &Vector3<f64>, air: &AirState) -> Vector3<f64> {
    -0.5 * air.density * v_rel.norm() * cd_s * v_rel
}

#[cfg(test)]
mod tests {
    use super::super::atmosphere::{Atmosphere, AtmosphereModel};
    use super::*;

    #[test]
    fn stagnant_air_has_no_drag() {
        let air = Atmosphere::new(AtmosphereModel::Isa).at(0.0);
        let m = DragModel::new(&RocketDesign::example());
        assert_eq!(m.body_drag(&Vector3::zeros(), &air), Vector3::zeros());
        assert_eq!(parachute_drag(2.0, &Vector3::zeros(), &air), Vector3::zeros());
    }

    #[test]
    fn example_subsonic_cd_in_band() {
        let air = Atmosphere::new(AtmosphereModel::Isa).at(0.0);
        let m = DragModel::new(&RocketDesign::example());
        for v in [30.0, 100.0, 200.0] {
            let cd = m.cd_at(v, &air);
            assert!((0.3..=0.9).contains(&cd), "v={v}: cd={cd}");
        }
    }

    #[test]
    fn drag_opposes_relative_velocity() {
        let air = Atmosphere::new(AtmosphereModel::Isa).at(0.0);
        let m = DragModel::new(&RocketDesign::example());
        let v = Vector3::new(3.0, -4.0, 100.0);
        let d = m.body_drag(&v, &air);
        assert!((d.normalize() + v.normalize()).norm() < 1e-12);
    }

    #[test]
    fn doubling_cd_s_halves_terminal_speed_squared() {
        // Terminal balance m g = 0.5 rho v^2 cd_s.
        let air = Atmosphere::new(AtmosphereModel::Isa).at(0.0);
        let weight = 10.0 * 9.80665;
        let vt2 = |cd_s: f64| {
            let v = (2.0 * weight / (air.density * cd_s)).sqrt();
            let d = parachute_drag(cd_s, &Vector3::new(0.0, 0.0, -v), &air);
            assert!((d.z - weight).abs() < 1e-9);
            v * v
        };
        assert!((vt2(2.0) / vt2(4.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn compressibility_is_bounded() {
        for i in 0..400 {
            let m = i as f64 * 0.01;
            let (f, w) = DragModel::compressibility(m);
            assert!(f >= 1.0 - 1e-12 || m > 1.3, "mach {m}: {f}");
            assert!(f <= 3.21 && f > 0.0);
            assert!(w == 0.0 || (0.95..1.3).contains(&m));
        }
    }
}
