use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::constants::*;
use crate::catalog::{Catalog, CatalogError};
use crate::design::{NoseKind, RocketDesign};
use crate::geometry::MassBreakdown;
use crate::sim::MaxQState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailingComponent {
    Body,
    Fins,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressReport {
    /// Pa
    pub max_q: f64,
    /// Pa, gust bending at the body midpoint.
    pub bending_stress: f64,
    /// Pa, thrust plus drag over the wall annulus.
    pub axial_stress: f64,
    /// Body material yield strength divided by the safety factor, Pa.
    pub allowable_stress: f64,
    /// Airspeed at which the fins would flutter, m/s.
    pub fin_flutter_velocity: f64,
    /// Flutter velocity over airspeed at max-Q. Below 1 means flutter.
    pub fin_flutter_margin: f64,
    /// Static stability margin in body calibers. Informational.
    pub static_margin: f64,
    pub failed: bool,
    pub failing_component: Option<FailingComponent>,
}

/// Thin-wall stresses and fin flutter at the max-Q flight point.
pub fn evaluate_structure(
    design: &RocketDesign,
    catalog: &Catalog,
    load: &MaxQState,
) -> Result<StressReport, CatalogError> {
    let body = &design.rocket_body;
    let fins = &design.aerodynamics.fins;
    let body_material = catalog.lookup_material(&body.material)?;
    let fin_material = catalog.lookup_material(&fins.material)?;

    let r = body.radius;
    let inner = (r - body.thickness).max(0.0);
    let annulus = PI * (r * r - inner * inner);
    let axial_stress = if load.thrust + load.drag == 0.0 {
        0.0
    } else {
        (load.thrust + load.drag) / annulus
    };

    // Pinned gust load on the lateral planform, applied at the midpoint of a
    // simply supported beam spanning the whole vehicle.
    let length = design.overall_length();
    let transverse = load.dynamic_pressure * GUST_AOA_DEG.to_radians() * (2.0 * r * length);
    let moment = transverse * length / 4.0;
    let inertia = PI / 4.0 * (r.powi(4) - inner.powi(4));
    let bending_stress = if moment == 0.0 { 0.0 } else { moment * r / inertia };

    let fin_flutter_velocity = flutter_velocity(design, fin_material.shear_modulus, load);
    let fin_flutter_margin = if load.airspeed > 0.0 {
        (fin_flutter_velocity / load.airspeed).min(MAX_REPORTED_MARGIN)
    } else {
        MAX_REPORTED_MARGIN
    };

    let allowable_stress = body_material.yield_strength / SAFETY_FACTOR;
    let failing_component = if axial_stress + bending_stress > allowable_stress {
        Some(FailingComponent::Body)
    } else if fin_flutter_margin < 1.0 {
        Some(FailingComponent::Fins)
    } else {
        None
    };
    Ok(StressReport {
        max_q: load.dynamic_pressure,
        bending_stress,
        axial_stress,
        allowable_stress,
        fin_flutter_velocity,
        fin_flutter_margin,
        static_margin: static_margin(design, catalog)?,
        failed: failing_component.is_some(),
        failing_component,
    })
}

/// `V_f = a * sqrt(G / (1.337 AR^3 P (λ+1) / (2 (AR+2) (t/c)^3)))` with
/// `t/c` on the root chord.
fn flutter_velocity(design: &RocketDesign, shear_modulus: f64, load: &MaxQState) -> f64 {
    let fins = &design.aerodynamics.fins;
    let area = fins.planform_area();
    let aspect = fins.span * fins.span / area;
    let taper = fins.tip_chord / fins.root_chord;
    let tc = fins.thickness / fins.root_chord;
    let pressure = if load.ambient_pressure > 0.0 {
        load.ambient_pressure
    } else {
        101_325.0
    };
    let sound = if load.speed_of_sound > 0.0 {
        load.speed_of_sound
    } else {
        340.29
    };
    let denom = FLUTTER_CONSTANT * aspect.powi(3) * pressure * (taper + 1.0) / (2.0 * (aspect + 2.0) * tc.powi(3));
    sound * (shear_modulus / denom).sqrt()
}

/// Barrowman centre of pressure minus centre of gravity, in body diameters.
/// Stations are measured from the nose tip; fins sit at the aft end of the
/// body tube.
pub fn static_margin(design: &RocketDesign, catalog: &Catalog) -> Result<f64, CatalogError> {
    let nose = &design.aerodynamics.nose_cone;
    let body = &design.rocket_body;
    let fins = &design.aerodynamics.fins;
    let tail = &design.aerodynamics.tail;
    let motor = catalog.lookup_motor(&design.motor_choice)?;
    let m = MassBreakdown::of(design, catalog)?;

    let body_start = nose.length;
    let body_end = nose.length + body.length;
    let cg_parts = [
        (m.nose, nose.length * 2.0 / 3.0),
        (m.body, body_start + body.length / 2.0),
        (m.fins, body_end - fins.root_chord / 2.0),
        (m.tail, body_end + tail.length / 2.0),
        (m.motor_dry + m.propellant, body_end - motor.length / 2.0),
        (m.payload, body_start + body.length / 2.0 - design.payload.position),
    ];
    let total: f64 = cg_parts.iter().map(|(mass, _)| mass).sum();
    let cg = cg_parts.iter().map(|(mass, x)| mass * x).sum::<f64>() / total;

    let d = 2.0 * body.radius;
    let nose_cp = nose.length
        * match nose.kind {
            NoseKind::Conical => 2.0 / 3.0,
            NoseKind::Ogive | NoseKind::Tangent => 0.466,
            _ => 0.5,
        };
    let mut terms = vec![(2.0, nose_cp)];

    let (cr, ct, s, n) = (fins.root_chord, fins.tip_chord, fins.span, fins.number as f64);
    let sweep = (cr - ct) / 2.0;
    let mid_chord = (s * s + (sweep + ct / 2.0 - cr / 2.0).powi(2)).sqrt();
    let interference = 1.0 + body.radius / (s + body.radius);
    let cn_fins =
        interference * 4.0 * n * (s / d).powi(2) / (1.0 + (1.0 + (2.0 * mid_chord / (cr + ct)).powi(2)).sqrt());
    let x_fins = body_end - cr + sweep / 3.0 * (cr + 2.0 * ct) / (cr + ct) + (cr + ct - cr * ct / (cr + ct)) / 6.0;
    terms.push((cn_fins, x_fins));

    let (dt, db) = (2.0 * tail.top_radius, 2.0 * tail.bottom_radius);
    let cn_tail = 2.0 * ((db / d).powi(2) - (dt / d).powi(2));
    let ratio = dt / db;
    let x_tail = body_end + tail.length / 3.0 * (1.0 + (1.0 - ratio) / (1.0 - ratio * ratio));
    if cn_tail.is_finite() && x_tail.is_finite() {
        terms.push((cn_tail, x_tail));
    }

    let cn: f64 = terms.iter().map(|(c, _)| c).sum();
    let cp = terms.iter().map(|(c, x)| c * x).sum::<f64>() / cn;
    Ok((cp - cg) / d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(q: f64, airspeed: f64) -> MaxQState {
        MaxQState {
            dynamic_pressure: q,
            airspeed,
            thrust: 1000.0,
            drag: 500.0,
            ambient_pressure: 90_000.0,
            speed_of_sound: 330.0,
            ..MaxQState::default()
        }
    }

    #[test]
    fn no_load_no_stress() {
        let d = RocketDesign::example();
        let r = evaluate_structure(&d, Catalog::builtin(), &MaxQState::default()).unwrap();
        assert_eq!(r.axial_stress, 0.0);
        assert_eq!(r.bending_stress, 0.0);
        assert!(!r.failed);
        assert_eq!(r.fin_flutter_margin, MAX_REPORTED_MARGIN);
    }

    // Thin-wall formulas written out independently.
    #[test]
    fn stress_formula_oracle() {
        let d = RocketDesign::example();
        let l = load(100_000.0, 300.0);
        let r = evaluate_structure(&d, Catalog::builtin(), &l).unwrap();
        let (ro, ri) = (0.1_f64, 0.09_f64);
        let axial = 1500.0 / (PI * (ro * ro - ri * ri));
        let total_len = 0.3 + 1.2 + 1.2;
        let force = 100_000.0 * 2.0_f64.to_radians() * 0.2 * total_len;
        let bending = force * total_len / 4.0 * ro / (PI / 4.0 * (ro.powi(4) - ri.powi(4)));
        assert!((r.axial_stress - axial).abs() / axial < 1e-12);
        assert!((r.bending_stress - bending).abs() / bending < 1e-12);
    }

    #[test]
    fn thin_wall_fails() {
        let mut d = RocketDesign::example();
        let l = load(163_000.0, 540.0);
        assert!(!evaluate_structure(&d, Catalog::builtin(), &l).unwrap().failed);
        d.rocket_body.thickness /= 100.0;
        let r = evaluate_structure(&d, Catalog::builtin(), &l).unwrap();
        assert!(r.failed);
        assert_eq!(r.failing_component, Some(FailingComponent::Body));
    }

    #[test]
    fn flimsy_fins_flutter() {
        let mut d = RocketDesign::example();
        d.aerodynamics.fins.material = "balsa_wood".into();
        d.aerodynamics.fins.thickness = 0.002;
        let r = evaluate_structure(&d, Catalog::builtin(), &load(50_000.0, 250.0)).unwrap();
        assert!(r.fin_flutter_margin < 1.0);
        assert_eq!(r.failing_component, Some(FailingComponent::Fins));
    }

    #[test]
    fn thicker_wall_never_fails_more() {
        let l = load(200_000.0, 600.0);
        let mut d = RocketDesign::example();
        let mut was_ok = false;
        for i in 1..200 {
            d.rocket_body.thickness = i as f64 * 0.0004;
            if d.rocket_body.thickness >= d.rocket_body.radius {
                break;
            }
            let r = evaluate_structure(&d, Catalog::builtin(), &l).unwrap();
            let ok = r.failing_component != Some(FailingComponent::Body);
            assert!(!(was_ok && !ok), "thickness {}", d.rocket_body.thickness);
            was_ok = ok;
        }
        assert!(was_ok);
    }

    #[test]
    fn example_is_statically_stable() {
        let m = static_margin(&RocketDesign::example(), Catalog::builtin()).unwrap();
        assert!(m.is_finite());
    }
}
