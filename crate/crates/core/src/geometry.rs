//! Component volumes, wetted areas and mass properties derived from a design.
//!
//! Cost and mass both come from these volumes, so a design's price and its
//! flying weight always agree on geometry. Nose and tail shells use the body
//! wall thickness.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, CatalogError};
use crate::design::{NoseKind, RocketDesign};

/// Segments in the polyline used to integrate nose surfaces.
const NOSE_SEGMENTS: usize = 400;
/// Power-series exponent.
const POWER_SERIES_N: f64 = 0.5;
/// Haack-series shape parameter for LV-Haack.
const LV_HAACK_C: f64 = 1.0 / 3.0;

/// Nose radius as a fraction of the base radius at `xi` = distance from
/// the tip / nose length. Ogive and tangent both use the tangent ogive.
pub fn nose_profile(kind: NoseKind, xi: f64, radius: f64, length: f64) -> f64 {
    let xi = xi.clamp(0.0, 1.0);
    let haack = |c: f64| {
        let th = (1.0 - 2.0 * xi).acos();
        ((th - (2.0 * th).sin() / 2.0 + c * th.sin().powi(3)).max(0.0) / PI).sqrt()
    };
    match kind {
        NoseKind::Conical => xi,
        NoseKind::Ogive | NoseKind::Tangent => {
            let rho = (radius * radius + length * length) / (2.0 * radius);
            let x = length * (1.0 - xi);
            ((rho * rho - x * x).max(0.0).sqrt() + radius - rho) / radius
        }
        NoseKind::Elliptical => (1.0 - (1.0 - xi).powi(2)).sqrt(),
        NoseKind::Parabolic => 2.0 * xi - xi * xi,
        NoseKind::PowerSeries => xi.powf(POWER_SERIES_N),
        NoseKind::VonKarman => haack(0.0),
        NoseKind::LvHaack => haack(LV_HAACK_C),
    }
}

/// Lateral area of the nose shell: the profile revolved about the axis,
/// summed as thin frusta.
pub fn nose_shell_area(kind: NoseKind, radius: f64, length: f64) -> f64 {
    if radius <= 0.0 || length <= 0.0 {
        return 0.0;
    }
    let n = NOSE_SEGMENTS;
    let mut area = 0.0;
    let (mut x0, mut y0) = (0.0, 0.0);
    for i in 1..=n {
        let xi = i as f64 / n as f64;
        let (x1, y1) = (xi * length, radius * nose_profile(kind, xi, radius, length));
        area += PI * (y0 + y1) * (x1 - x0).hypot(y1 - y0);
        (x0, y0) = (x1, y1);
    }
    area
}

fn frustum_volume(r1: f64, r2: f64, length: f64) -> f64 {
    PI * length / 3.0 * (r1 * r1 + r1 * r2 + r2 * r2)
}

/// Solid frustum minus the frustum of radii reduced by `thickness`.
pub fn tail_shell_volume(top: f64, bottom: f64, length: f64, thickness: f64) -> f64 {
    let inner_top = (top - thickness).max(0.0);
    let inner_bottom = (bottom - thickness).max(0.0);
    frustum_volume(top, bottom, length) - frustum_volume(inner_top, inner_bottom, length)
}

pub fn body_shell_volume(radius: f64, length: f64, thickness: f64) -> f64 {
    let inner = (radius - thickness).max(0.0);
    PI * (radius * radius - inner * inner) * length
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentVolumes {
    pub body: f64,
    pub nose: f64,
    pub fins: f64,
    pub tail: f64,
}

impl ComponentVolumes {
    pub fn of(design: &RocketDesign) -> ComponentVolumes {
        let body = &design.rocket_body;
        let nose = &design.aerodynamics.nose_cone;
        let fins = &design.aerodynamics.fins;
        let tail = &design.aerodynamics.tail;
        ComponentVolumes {
            body: body_shell_volume(body.radius, body.length, body.thickness),
            nose: nose_shell_area(nose.kind, body.radius, nose.length) * body.thickness,
            fins: fins.number as f64 * fins.planform_area() * fins.thickness,
            tail: tail_shell_volume(tail.top_radius, tail.bottom_radius, tail.length, body.thickness),
        }
    }
}

/// Body cross-section, the drag reference area.
pub fn reference_area(design: &RocketDesign) -> f64 {
    PI * design.rocket_body.radius.powi(2)
}

/// Total wetted area of body, nose, tail and both faces of every fin.
pub fn wetted_area(design: &RocketDesign) -> f64 {
    let body = &design.rocket_body;
    let nose = &design.aerodynamics.nose_cone;
    let fins = &design.aerodynamics.fins;
    let tail = &design.aerodynamics.tail;
    let slant = ((tail.top_radius - tail.bottom_radius).powi(2) + tail.length.powi(2)).sqrt();
    2.0 * PI * body.radius * body.length
        + nose_shell_area(nose.kind, body.radius, nose.length)
        + PI * (tail.top_radius + tail.bottom_radius) * slant
        + 2.0 * fins.number as f64 * fins.planform_area()
}

/// Masses of everything that flies, in kg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassBreakdown {
    pub body: f64,
    pub nose: f64,
    pub fins: f64,
    pub tail: f64,
    pub motor_dry: f64,
    pub propellant: f64,
    pub payload: f64,
}

impl MassBreakdown {
    pub fn of(design: &RocketDesign, catalog: &Catalog) -> Result<MassBreakdown, CatalogError> {
        let v = ComponentVolumes::of(design);
        let density = |name: &str| catalog.lookup_material(name).map(|m| m.density);
        let motor = catalog.lookup_motor(&design.motor_choice)?;
        Ok(MassBreakdown {
            body: v.body * density(&design.rocket_body.material)?,
            nose: v.nose * density(&design.aerodynamics.nose_cone.material)?,
            fins: v.fins * density(&design.aerodynamics.fins.material)?,
            tail: v.tail * density(&design.aerodynamics.tail.material)?,
            motor_dry: motor.dry_mass,
            propellant: motor.propellant_mass(),
            payload: design.payload.mass,
        })
    }

    /// Everything except propellant.
    pub fn dry(&self) -> f64 {
        self.body + self.nose + self.fins + self.tail + self.motor_dry + self.payload
    }

    pub fn wet(&self) -> f64 {
        self.dry() + self.propellant
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shells_vanish_with_thickness() {
        assert_eq!(body_shell_volume(0.1, 1.0, 0.0), 0.0);
        assert_eq!(tail_shell_volume(0.04, 0.05, 1.0, 0.0), 0.0);
    }

    #[test]
    fn thick_tail_is_solid() {
        let solid = frustum_volume(0.04, 0.05, 1.0);
        assert!((tail_shell_volume(0.04, 0.05, 1.0, 1.0) - solid).abs() < 1e-15);
    }

    #[test]
    fn cone_area_is_exact() {
        let (r, l) = (0.1, 0.3);
        let exact = PI * r * (r * r + l * l).sqrt();
        assert!((nose_shell_area(NoseKind::Conical, r, l) - exact).abs() < 1e-12);
    }

    #[test]
    fn profiles_span_tip_to_base() {
        for kind in NoseKind::ALL {
            assert!(nose_profile(kind, 0.0, 0.1, 0.3).abs() < 1e-9, "{kind:?}");
            assert!((nose_profile(kind, 1.0, 0.1, 0.3) - 1.0).abs() < 1e-9, "{kind:?}");
        }
    }

    #[test]
    fn blunter_noses_have_more_area() {
        let cone = nose_shell_area(NoseKind::Conical, 0.1, 0.3);
        for kind in NoseKind::ALL {
            assert!(nose_shell_area(kind, 0.1, 0.3) >= cone - 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn example_masses_are_plausible() {
        let m = MassBreakdown::of(&RocketDesign::example(), Catalog::builtin()).unwrap();
        assert!(m.wet() > 30.0 && m.wet() < 80.0, "{m:?}");
        assert!((m.wet() - m.dry() - m.propellant).abs() < 1e-12);
    }
}
