use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, CatalogError};
use crate::design::RocketDesign;
use crate::geometry::ComponentVolumes;

/// USD. `total_cost = motor_cost + body + nose + fins + tail`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub motor_cost: f64,
    pub body_cost: f64,
    pub nose_cost: f64,
    pub fins_cost: f64,
    pub tail_cost: f64,
    pub total_cost: f64,
}

/// Fixed motor price plus material volume times unit price for each
/// component. Depends on the design only.
pub fn compute_cost(design: &RocketDesign, catalog: &Catalog) -> Result<CostBreakdown, CatalogError> {
    let motor_cost = catalog.lookup_motor(&design.motor_choice)?.cost;
    let v = ComponentVolumes::of(design);
    let price = |name: &str| catalog.lookup_material(name).map(|m| m.unit_price);
    let body_cost = v.body * price(&design.rocket_body.material)?;
    let nose_cost = v.nose * price(&design.aerodynamics.nose_cone.material)?;
    let fins_cost = v.fins * price(&design.aerodynamics.fins.material)?;
    let tail_cost = v.tail * price(&design.aerodynamics.tail.material)?;
    Ok(CostBreakdown {
        motor_cost,
        body_cost,
        nose_cost,
        fins_cost,
        tail_cost,
        total_cost: motor_cost + body_cost + nose_cost + fins_cost + tail_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h128w_floor() {
        let mut d = RocketDesign::example();
        d.motor_choice = "AeroTechH128W".into();
        let c = compute_cost(&d, Catalog::builtin()).unwrap();
        assert_eq!(c.motor_cost, 65.0);
        assert!(c.total_cost >= 65.0);
    }

    #[test]
    fn zero_thickness_body_is_free() {
        let mut d = RocketDesign::example();
        d.rocket_body.thickness = 0.0;
        let c = compute_cost(&d, Catalog::builtin()).unwrap();
        assert_eq!(c.body_cost, 0.0);
        assert_eq!(c.nose_cost, 0.0);
        assert_eq!(c.tail_cost, 0.0);
    }

    #[test]
    fn unknown_material_is_an_error() {
        let mut d = RocketDesign::example();
        d.aerodynamics.fins.material = "unobtainium".into();
        assert!(compute_cost(&d, Catalog::builtin()).is_err());
    }
}
