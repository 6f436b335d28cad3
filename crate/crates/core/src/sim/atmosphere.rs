use serde::{Deserialize, Serialize};

const R_AIR: f64 = 287.05287;
const GAMMA: f64 = 1.4;
const G0: f64 = 9.80665;

/// Layer base altitudes (m) and lapse rates (K/m), 1976 standard atmosphere.
const LAYERS: [(f64, f64); 7] = [
    (0.0, -0.0065),
    (11_000.0, 0.0),
    (20_000.0, 0.001),
    (32_000.0, 0.0028),
    (47_000.0, 0.0),
    (51_000.0, -0.0028),
    (71_000.0, -0.002),
];
const TOP: f64 = 84_852.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum AtmosphereModel {
    /// International Standard Atmosphere, sea-level ground.
    #[default]
    Isa,
    /// Uniform air, used by the analytic oracle tests.
    Constant { density: f64, temperature: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirState {
    pub density: f64,
    pub pressure: f64,
    pub temperature: f64,
    pub speed_of_sound: f64,
    pub dynamic_viscosity: f64,
}

/// Precomputed atmosphere lookup.
#[derive(Debug, Clone)]
pub struct Atmosphere {
    model: AtmosphereModel,
    base_temperature: [f64; 7],
    base_pressure: [f64; 7],
}

impl Atmosphere {
    pub fn new(model: AtmosphereModel) -> Atmosphere {
        let mut base_temperature = [0.0; 7];
        let mut base_pressure = [0.0; 7];
        base_temperature[0] = 288.15;
        base_pressure[0] = 101_325.0;
        for i in 1..LAYERS.len() {
            let (h0, lapse) = LAYERS[i - 1];
            let dh = LAYERS[i].0 - h0;
            let (t, p) = layer(base_temperature[i - 1], base_pressure[i - 1], lapse, dh);
            base_temperature[i] = t;
            base_pressure[i] = p;
        }
        Atmosphere {
            model,
            base_temperature,
            base_pressure,
        }
    }

    pub fn at(&self, altitude: f64) -> AirState {
        let (temperature, pressure, density) = match self.model {
            AtmosphereModel::Isa => {
                let h = altitude.clamp(0.0, TOP);
                let i = LAYERS.iter().rposition(|(base, _)| h >= *base).unwrap_or(0);
                let (base, lapse) = LAYERS[i];
                let (t, p) = layer(self.base_temperature[i], self.base_pressure[i], lapse, h - base);
                (t, p, p / (R_AIR * t))
            }
            AtmosphereModel::Constant { density, temperature } => (temperature, density * R_AIR * temperature, density),
        };
        AirState {
            density,
            pressure,
            temperature,
            speed_of_sound: (GAMMA * R_AIR * temperature).sqrt(),
            dynamic_viscosity: sutherland(temperature),
        }
    }
}

fn layer(t0: f64, p0: f64, lapse: f64, dh: f64) -> (f64, f64) {
    if lapse == 0.0 {
        (t0, p0 * (-G0 * dh / (R_AIR * t0)).exp())
    } else {
        let t = t0 + lapse * dh;
        (t, p0 * (t / t0).powf(-G0 / (lapse * R_AIR)))
    }
}

fn sutherland(t: f64) -> f64 {
    1.458e-6 * t.powf(1.5) / (t + 110.4)
}
