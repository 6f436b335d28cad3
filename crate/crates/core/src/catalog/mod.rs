//! Fixed tables of commercially available motors and materials.
//!
//! Both tables are checked in as delimiter-separated text under `data/` and
//! embedded at compile time. The motor table is kept byte-identical to the
//! table shown to agents in the task brief, so the brief renders it verbatim
//! from [`MOTORS_CSV`].
//!
//! The motor table's third column is headed `Radius (mm)` but carries the
//! motor class diameter (a `Pro75...` motor lists 75). The loader stores
//! `radius = value / 2000` metres. See [`MotorSpec::radius`].

mod thrust;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use thrust::ThrustProfile;

/// Standard gravity used for propellant mass derivation.
pub const G0: f64 = 9.80665;

/// Motor table exactly as shipped.
pub const MOTORS_CSV: &str = include_str!("../../data/motors.csv");
/// Material constants table exactly as shipped.
pub const MATERIALS_CSV: &str = include_str!("../../data/materials.csv");

const MOTOR_HEADER: &str = "Name,Manufacturer,Radius (mm),Length (mm),Dry Mass (kg),Max Thrust (N),Avg Thrust (N),Burn Time (s),Total Impulse (Ns),Isp (s), Cost ($)";
const MATERIAL_HEADER: &str = "name,density_kg_m3,yield_strength_pa,shear_modulus_pa,unit_price_usd_m3,source";

/// The seven material names, in table order.
pub const MATERIAL_NAMES: [&str; 7] = [
    "aluminum",
    "composite",
    "fiberglass",
    "carbon_fiber",
    "balsa_wood",
    "plywood",
    "ABS_plastic",
];

/// Environment variable naming a directory holding replacement
/// `motors.csv` / `materials.csv` files.
pub const CATALOG_DIR_ENV: &str = "ROCKETBENCH_CATALOG_DIR";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown motor `{0}`")]
    UnknownMotor(String),
    #[error("unknown material `{0}`")]
    UnknownMaterial(String),
    #[error("{table} table header mismatch: expected `{expected}`, found `{found}`")]
    Header {
        table: &'static str,
        expected: &'static str,
        found: String,
    },
    #[error("{table} table line {line}: {message}")]
    Row {
        table: &'static str,
        line: usize,
        message: String,
    },
    #[error("material table must contain exactly {expected:?}, found {found:?}")]
    MaterialSet { expected: Vec<String>, found: Vec<String> },
    #[error("reading catalog file {path}: {message}")]
    Io { path: String, message: String },
}

/// One commercial solid motor. Lengths in metres, masses in kg.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotorSpec {
    pub name: String,
    pub manufacturer: String,
    /// Casing radius. Half the listed class diameter.
    pub radius: f64,
    pub length: f64,
    pub dry_mass: f64,
    pub max_thrust: f64,
    pub avg_thrust: f64,
    pub burn_time: f64,
    pub total_impulse: f64,
    pub isp: f64,
    pub cost: f64,
}

impl MotorSpec {
    /// `total_impulse / (isp * g0)`.
    pub fn propellant_mass(&self) -> f64 {
        self.total_impulse / (self.isp * G0)
    }

    pub fn wet_mass(&self) -> f64 {
        self.dry_mass + self.propellant_mass()
    }

    pub fn thrust_profile(&self) -> ThrustProfile {
        ThrustProfile::for_motor(self)
    }

    /// Relative gap between `total_impulse` and `avg_thrust * burn_time`.
    pub fn impulse_consistency_error(&self) -> f64 {
        (self.total_impulse - self.avg_thrust * self.burn_time).abs() / self.total_impulse
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub name: String,
    /// kg/m³
    pub density: f64,
    /// Pa
    pub yield_strength: f64,
    /// Pa, used by the fin flutter estimate.
    pub shear_modulus: f64,
    /// USD/m³
    pub unit_price: f64,
    pub source: String,
}

/// A catalog-level consistency finding. These are reported, not fatal: the
/// shipped motor table itself has rows whose impulse and
/// `avg_thrust * burn_time` disagree by more than 10%.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogWarning {
    pub motor: String,
    pub message: String,
}

/// Immutable motor and material tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    motors: Vec<MotorSpec>,
    materials: Vec<MaterialSpec>,
    motor_index: BTreeMap<String, usize>,
    material_index: BTreeMap<String, usize>,
    motors_source: String,
}

/// Relative tolerance for the impulse self-consistency check.
pub const IMPULSE_CONSISTENCY_TOLERANCE: f64 = 0.10;

impl Catalog {
    /// The built-in tables. Parsed once per process.
    pub fn builtin() -> &'static Catalog {
        static BUILTIN: OnceLock<Catalog> = OnceLock::new();
        BUILTIN.get_or_init(|| Catalog::from_tables(MOTORS_CSV, MATERIALS_CSV).expect("embedded catalog is valid"))
    }

    /// Loads from `$ROCKETBENCH_CATALOG_DIR` when set, else the built-in tables.
    pub fn from_env() -> Result<Catalog, CatalogError> {
        match std::env::var_os(CATALOG_DIR_ENV) {
            Some(dir) => Catalog::from_dir(Path::new(&dir)),
            None => Ok(Catalog::builtin().clone()),
        }
    }

    pub fn from_dir(dir: &Path) -> Result<Catalog, CatalogError> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|e| CatalogError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })
        };
        Catalog::from_tables(&read("motors.csv")?, &read("materials.csv")?)
    }

    pub fn from_tables(motors_csv: &str, materials_csv: &str) -> Result<Catalog, CatalogError> {
        let motors = parse_motors(motors_csv)?;
        let materials = parse_materials(materials_csv)?;
        let motor_index = motors.iter().enumerate().map(|(i, m)| (m.name.clone(), i)).collect();
        let material_index = materials.iter().enumerate().map(|(i, m)| (m.name.clone(), i)).collect();
        Ok(Catalog {
            motors,
            materials,
            motor_index,
            material_index,
            motors_source: motors_csv.to_string(),
        })
    }

    pub fn lookup_motor(&self, name: &str) -> Result<&MotorSpec, CatalogError> {
        self.motor_index
            .get(name)
            .map(|&i| &self.motors[i])
            .ok_or_else(|| CatalogError::UnknownMotor(name.to_string()))
    }

    /// Exact, case-sensitive.
    pub fn lookup_material(&self, name: &str) -> Result<&MaterialSpec, CatalogError> {
        self.material_index
            .get(name)
            .map(|&i| &self.materials[i])
            .ok_or_else(|| CatalogError::UnknownMaterial(name.to_string()))
    }

    /// Motors in table order.
    pub fn motors(&self) -> &[MotorSpec] {
        &self.motors
    }

    /// Materials in table order.
    pub fn materials(&self) -> &[MaterialSpec] {
        &self.materials
    }

    /// The motor table text this catalog was loaded from.
    pub fn motors_table(&self) -> &str {
        &self.motors_source
    }

    pub fn warnings(&self) -> Vec<CatalogWarning> {
        self.motors
            .iter()
            .filter(|m| m.impulse_consistency_error() > IMPULSE_CONSISTENCY_TOLERANCE)
            .map(|m| CatalogWarning {
                motor: m.name.clone(),
                message: format!(
                    "total impulse {} N·s differs from avg_thrust × burn_time = {:.1} N·s by {:.1}%",
                    m.total_impulse,
                    m.avg_thrust * m.burn_time,
                    100.0 * m.impulse_consistency_error()
                ),
            })
            .collect()
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn check_header(text: &str, table: &'static str, expected: &'static str) -> Result<(), CatalogError> {
    let found = text.lines().next().unwrap_or("").trim_end_matches('\r');
    if found != expected {
        return Err(CatalogError::Header {
            table,
            expected,
            found: found.to_string(),
        });
    }
    Ok(())
}

fn number(record: &csv::StringRecord, col: usize, table: &'static str, line: usize) -> Result<f64, CatalogError> {
    let raw = record.get(col).unwrap_or("");
    raw.parse::<f64>().map_err(|_| CatalogError::Row {
        table,
        line,
        message: format!("column {} is not a number: `{raw}`", col + 1),
    })
}

fn parse_motors(text: &str) -> Result<Vec<MotorSpec>, CatalogError> {
    const TABLE: &str = "motor";
    check_header(text, TABLE, MOTOR_HEADER)?;
    let mut motors = Vec::new();
    for (i, record) in reader(text).records().enumerate().skip(1) {
        let line = i + 1;
        let record = record.map_err(|e| CatalogError::Row {
            table: TABLE,
            line,
            message: e.to_string(),
        })?;
        if record.len() != 11 {
            return Err(CatalogError::Row {
                table: TABLE,
                line,
                message: format!("expected 11 columns, found {}", record.len()),
            });
        }
        let num = |c| number(&record, c, TABLE, line);
        let motor = MotorSpec {
            name: record[0].to_string(),
            manufacturer: record[1].to_string(),
            radius: num(2)? / 2000.0,
            length: num(3)? / 1000.0,
            dry_mass: num(4)?,
            max_thrust: num(5)?,
            avg_thrust: num(6)?,
            burn_time: num(7)?,
            total_impulse: num(8)?,
            isp: num(9)?,
            cost: num(10)?,
        };
        let positive = [
            motor.radius,
            motor.length,
            motor.dry_mass,
            motor.max_thrust,
            motor.avg_thrust,
            motor.burn_time,
            motor.total_impulse,
            motor.isp,
            motor.cost,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(CatalogError::Row {
                table: TABLE,
                line,
                message: format!("{}: physical quantities must be positive", motor.name),
            });
        }
        if motor.avg_thrust > motor.max_thrust {
            return Err(CatalogError::Row {
                table: TABLE,
                line,
                message: format!("{}: average thrust exceeds max thrust", motor.name),
            });
        }
        motors.push(motor);
    }
    Ok(motors)
}

fn parse_materials(text: &str) -> Result<Vec<MaterialSpec>, CatalogError> {
    const TABLE: &str = "material";
    check_header(text, TABLE, MATERIAL_HEADER)?;
    let mut materials = Vec::new();
    for (i, record) in reader(text).records().enumerate().skip(1) {
        let line = i + 1;
        let record = record.map_err(|e| CatalogError::Row {
            table: TABLE,
            line,
            message: e.to_string(),
        })?;
        if record.len() != 6 {
            return Err(CatalogError::Row {
                table: TABLE,
                line,
                message: format!("expected 6 columns, found {}", record.len()),
            });
        }
        let num = |c| number(&record, c, TABLE, line);
        let material = MaterialSpec {
            name: record[0].to_string(),
            density: num(1)?,
            yield_strength: num(2)?,
            shear_modulus: num(3)?,
            unit_price: num(4)?,
            source: record[5].to_string(),
        };
        if !(material.density > 0.0 && material.yield_strength > 0.0 && material.shear_modulus > 0.0)
            || !(material.unit_price >= 0.0)
        {
            return Err(CatalogError::Row {
                table: TABLE,
                line,
                message: format!("{}: constants out of range", material.name),
            });
        }
        materials.push(material);
    }
    let mut found: Vec<String> = materials.iter().map(|m| m.name.clone()).collect();
    let mut expected: Vec<String> = MATERIAL_NAMES.iter().map(|s| s.to_string()).collect();
    found.sort();
    expected.sort();
    if found != expected {
        return Err(CatalogError::MaterialSet { expected, found });
    }
    Ok(materials)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pro75_row() {
        let m = Catalog::builtin().lookup_motor("Pro75M1670").unwrap();
        assert_eq!(m.radius, 0.0375);
        assert_eq!(m.length, 0.757);
        assert_eq!(m.avg_thrust, 1533.9);
        assert_eq!(m.burn_time, 3.9);
        assert_eq!(m.cost, 520.0);
    }

    #[test]
    fn o5800_row() {
        let m = Catalog::builtin().lookup_motor("CesaroniO5800").unwrap();
        assert_eq!(m.total_impulse, 30382.7);
        assert_eq!(m.cost, 1100.0);
        assert_eq!(m.radius, 0.075);
    }

    #[test]
    fn unknown_motor() {
        assert_eq!(
            Catalog::builtin().lookup_motor("NoSuchMotor"),
            Err(CatalogError::UnknownMotor("NoSuchMotor".into()))
        );
    }

    #[test]
    fn materials_are_case_sensitive() {
        let c = Catalog::builtin();
        assert!(c.lookup_material("carbon_fiber").is_ok());
        assert_eq!(
            c.lookup_material("Carbon_Fiber"),
            Err(CatalogError::UnknownMaterial("Carbon_Fiber".into()))
        );
        let balsa = c.lookup_material("balsa_wood").unwrap();
        let alu = c.lookup_material("aluminum").unwrap();
        assert!(balsa.density < alu.density);
    }

    #[test]
    fn motor_costs_match_table() {
        let c = Catalog::builtin();
        let expected = [
            ("Pro75M1670", 520.0),
            ("AeroTechK700W", 180.0),
            ("CesaroniM1670", 550.0),
            ("AeroTechH128W", 65.0),
            ("CesaroniO3700", 1250.0),
            ("CesaroniO5800", 1100.0),
            ("CesaroniK160", 130.0),
        ];
        assert_eq!(c.motors().len(), expected.len());
        for (name, cost) in expected {
            assert_eq!(c.lookup_motor(name).unwrap().cost, cost, "{name}");
        }
        assert_eq!(c.materials().len(), 7);
    }

    #[test]
    fn impulse_consistency_flags_three_rows() {
        let flagged: Vec<String> = Catalog::builtin().warnings().into_iter().map(|w| w.motor).collect();
        assert_eq!(flagged, ["CesaroniO3700", "CesaroniO5800", "CesaroniK160"]);
    }

    #[test]
    fn header_must_match_exactly() {
        let bad = MOTORS_CSV.replacen("Radius (mm)", "Radius(mm)", 1);
        assert!(matches!(
            Catalog::from_tables(&bad, MATERIALS_CSV),
            Err(CatalogError::Header { table: "motor", .. })
        ));
        let bad = MATERIALS_CSV.replacen("density_kg_m3", "density", 1);
        assert!(matches!(
            Catalog::from_tables(MOTORS_CSV, &bad),
            Err(CatalogError::Header { table: "material", .. })
        ));
    }

    #[test]
    fn material_set_is_closed() {
        let extra = format!("{MATERIALS_CSV}steel,7850,250000000,79000000000,4000,x\n");
        assert!(matches!(
            Catalog::from_tables(MOTORS_CSV, &extra),
            Err(CatalogError::MaterialSet { .. })
        ));
    }

    #[test]
    fn propellant_mass_from_isp() {
        let m = Catalog::builtin().lookup_motor("Pro75M1670").unwrap();
        assert!((m.propellant_mass() - 6023.6 / (198.0 * 9.80665)).abs() < 1e-12);
    }

    #[test]
    fn motors_table_is_verbatim() {
        assert_eq!(Catalog::builtin().motors_table(), MOTORS_CSV);
        assert!(MOTORS_CSV.contains("Pro75M1670,CTI,75,757,1.815,2200,1533.9,3.9,6023.6,198, 520"));
    }
}
