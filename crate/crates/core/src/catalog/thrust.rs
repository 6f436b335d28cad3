use serde::{Deserialize, Serialize};

use super::MotorSpec;

/// Fraction of the burn spent on each linear ramp.
pub const RAMP_FRACTION: f64 = 0.1;

/// Trapezoidal thrust curve: linear rise to `max_thrust` over the first 10%
/// of the burn, a constant plateau, then a linear fall to zero over the last
/// 10%. The plateau level is solved so the curve integrates to the motor's
/// total impulse.
///
/// Two catalog motors (CesaroniO3700, CesaroniO5800) cannot meet both their
/// listed impulse and max thrust under this shape; impulse wins and their
/// plateau sits slightly above the listed maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThrustProfile {
    pub burn_time: f64,
    pub max_thrust: f64,
    pub plateau: f64,
    pub total_impulse: f64,
}

impl ThrustProfile {
    pub fn for_motor(motor: &MotorSpec) -> ThrustProfile {
        let b = motor.burn_time;
        let plateau =
            (motor.total_impulse - 0.5 * RAMP_FRACTION * b * motor.max_thrust) / ((1.0 - 1.5 * RAMP_FRACTION) * b);
        ThrustProfile {
            burn_time: b,
            max_thrust: motor.max_thrust,
            plateau,
            total_impulse: motor.total_impulse,
        }
    }

    fn ramp(&self) -> f64 {
        RAMP_FRACTION * self.burn_time
    }

    /// Thrust in newtons at time `t` since ignition.
    pub fn thrust_at(&self, t: f64) -> f64 {
        let r = self.ramp();
        let b = self.burn_time;
        if !(t > 0.0) || t >= b {
            0.0
        } else if t < r {
            self.max_thrust * t / r
        } else if t < b - r {
            self.plateau
        } else {
            self.plateau * (b - t) / r
        }
    }

    /// Impulse delivered over `[0, t]`, exact for the piecewise-linear curve.
    /// Returns `total_impulse` bit-exactly once the burn is over.
    pub fn impulse_until(&self, t: f64) -> f64 {
        let r = self.ramp();
        let b = self.burn_time;
        if !(t > 0.0) {
            0.0
        } else if t < r {
            self.max_thrust * t * t / (2.0 * r)
        } else if t < b - r {
            self.max_thrust * r / 2.0 + self.plateau * (t - r)
        } else if t < b {
            let rem = b - t;
            self.max_thrust * r / 2.0 + self.plateau * (b - 2.0 * r) + self.plateau * r / 2.0
                - self.plateau * rem * rem / (2.0 * r)
        } else {
            self.total_impulse
        }
    }

    /// Fraction of total impulse still undelivered at `t`.
    pub fn remaining_fraction(&self, t: f64) -> f64 {
        if t >= self.burn_time {
            0.0
        } else {
            (1.0 - self.impulse_until(t) / self.total_impulse).max(0.0)
        }
    }

    /// Times where the curve has a kink; integrators land steps on these.
    pub fn breakpoints(&self) -> [f64; 3] {
        let r = self.ramp();
        [r, self.burn_time - r, self.burn_time]
    }
}
