//! Closed-form checks on the flight integrator.

use rocketbench::catalog::{Catalog, G0};
use rocketbench::design::{run_drc, RocketDesign, Trigger};
use rocketbench::sim::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ballistic_settings(v0: f64) -> SimSettings {
    SimSettings {
        physics: PhysicsSwitches {
            thrust: false,
            body_drag: false,
            parachutes: false,
        },
        initial: Some(InitialState {
            position: [0.0, 0.0, 0.0],
            velocity: [0.0, 0.0, v0],
            phase: StartPhase::Free,
            mass: None,
        }),
        trace: true,
        ..SimSettings::default()
    }
}

#[test]
fn ballistic_apogee_and_flight_time() {
    let d = RocketDesign::example();
    let (o, _) = simulate(&d, Catalog::builtin(), &Environment::calm(), &ballistic_settings(100.0));
    assert!(o.failure.is_none());
    let apogee = 100.0 * 100.0 / (2.0 * G0);
    let time = 2.0 * 100.0 / G0;
    assert!(rel(o.apogee, apogee) < 5e-4, "{} vs {apogee}", o.apogee);
    assert!((o.apogee - 509.86).abs() < 0.01);
    assert!(rel(o.flight_time, time) < 5e-4, "{} vs {time}", o.flight_time);
    assert!(o.landing_x.abs() < 1e-9 && o.landing_y.abs() < 1e-9);
}

#[test]
fn ballistic_ignores_wind_without_drag() {
    let d = RocketDesign::example();
    let env = Environment::with_wind("20@N".parse().unwrap());
    let (o, _) = simulate(&d, Catalog::builtin(), &env, &ballistic_settings(60.0));
    assert!(o.horizontal_distance < 1e-9);
}

#[test]
fn energy_is_conserved_in_vacuum_coast() {
    let d = RocketDesign::example();
    let (o, trace) = simulate(&d, Catalog::builtin(), &Environment::calm(), &ballistic_settings(150.0));
    let e0 = 0.5 * 150.0 * 150.0;
    let apogee_t = o.apogee_time.unwrap();
    for row in trace.iter().filter(|r| r.t <= apogee_t) {
        let v2 = row.vx * row.vx + row.vy * row.vy + row.vz * row.vz;
        let e = 0.5 * v2 + G0 * row.z;
        assert!(rel(e, e0) < 1e-3, "t={} e={e}", row.t);
    }
}

fn descent(mass: f64, cd_s: f64, altitude: f64, vx: f64, env: &Environment) -> FlightOutcome {
    let mut d = RocketDesign::example();
    d.parachutes.main.cd_s = cd_s;
    let settings = SimSettings {
        initial: Some(InitialState {
            position: [0.0, 0.0, altitude],
            velocity: [vx, 0.0, 0.0],
            phase: StartPhase::Main,
            mass: Some(mass),
        }),
        ..SimSettings::default()
    };
    simulate(&d, Catalog::builtin(), env, &settings).0
}

fn sea_level_calm() -> Environment {
    Environment {
        atmosphere: AtmosphereModel::Constant {
            density: 1.225,
            temperature: 288.15,
        },
        ..Environment::calm()
    }
}

#[test]
fn terminal_velocity() {
    let o = descent(10.0, 2.0, 500.0, 0.0, &sea_level_calm());
    let vt = (2.0 * 10.0 * G0 / (1.225 * 2.0)).sqrt();
    assert!((vt - 8.95).abs() < 0.005);
    assert!(rel(o.impact_velocity, vt) < 0.01, "{} vs {vt}", o.impact_velocity);
}

#[test]
fn doubling_cd_s_halves_terminal_speed_squared() {
    let a = descent(10.0, 1.0, 400.0, 0.0, &sea_level_calm()).impact_velocity;
    let b = descent(10.0, 2.0, 400.0, 0.0, &sea_level_calm()).impact_velocity;
    assert!(rel(b * b, a * a / 2.0) < 0.01);
}

#[test]
fn wind_drift_toward_west() {
    let mut env = sea_level_calm();
    env.wind = "5@E".parse().unwrap();
    let vt = (2.0 * 10.0 * G0 / (1.225 * 2.0)).sqrt();
    // Starts already moving with the air so the whole descent is drift.
    let o = descent(10.0, 2.0, 100.0 * vt, -5.0, &env);
    assert!((o.flight_time - 100.0).abs() < 2.0, "{}", o.flight_time);
    let expected = -5.0 * o.flight_time;
    assert!(o.landing_x < 0.0);
    assert!(rel(o.landing_x, expected) < 0.05, "{} vs {expected}", o.landing_x);
    assert!(o.landing_y.abs() < 1e-6);
    assert!(rel(o.landing_x, -500.0) < 0.05);
}

#[test]
fn wind_from_north_pushes_south() {
    let mut env = sea_level_calm();
    env.wind = "5@N".parse().unwrap();
    let o = descent(10.0, 2.0, 300.0, 0.0, &env);
    assert!(o.landing_y < 0.0);
    assert!(o.landing_x.abs() < 1e-6);
}

fn example_flight() -> (FlightOutcome, Vec<TraceRow>) {
    let d = RocketDesign::example();
    let env = Environment::with_wind("5@E".parse().unwrap());
    let settings = SimSettings {
        trace: true,
        ..SimSettings::default()
    };
    simulate(&d, Catalog::builtin(), &env, &settings)
}

#[test]
fn example_flight_is_sane() {
    let (o, _) = example_flight();
    assert!(o.failure.is_none());
    assert!(o.apogee > 1000.0 && o.apogee < 20_000.0, "{}", o.apogee);
    assert!(o.rail_exit_velocity.unwrap() > 5.0);
    assert!(rel(o.horizontal_distance, o.landing_x.hypot(o.landing_y)) < 1e-12);
}

#[test]
fn event_ordering() {
    let (o, _) = example_flight();
    let t = |k| o.event(k).unwrap_or_else(|| panic!("missing {k:?}")).time;
    use FlightEventKind::*;
    let before = [
        (Liftoff, RailExit),
        (RailExit, Burnout),
        (Burnout, Apogee),
        (Apogee, DrogueTrigger),
        (DrogueTrigger, DrogueDeploy),
        (DrogueTrigger, MainTrigger),
        (MainTrigger, MainDeploy),
        (DrogueDeploy, MainDeploy),
        (MainDeploy, Touchdown),
    ];
    for (a, b) in before {
        assert!(t(a) <= t(b), "{a:?} after {b:?}");
    }
    assert!(o.events.windows(2).all(|w| w[0].time <= w[1].time));
}

#[test]
fn altitude_triggered_main_fires_below_its_altitude() {
    let mut d = RocketDesign::example();
    d.parachutes.main.trigger = Trigger::Altitude(500.0);
    let env = Environment::with_wind("5@E".parse().unwrap());
    let (o, _) = simulate(&d, Catalog::builtin(), &env, &SimSettings::default());
    let main = o.event(FlightEventKind::MainTrigger).unwrap();
    assert!((main.altitude - 500.0).abs() < 0.01, "{}", main.altitude);
    assert!(main.time > o.apogee_time.unwrap());
}

#[test]
fn apogee_is_localized() {
    let (o, trace) = example_flight();
    let ta = o.apogee_time.unwrap();
    let row = trace.iter().find(|r| r.t == ta).expect("apogee row in trace");
    assert!(row.vz.abs() < 1e-3, "vz = {}", row.vz);
    assert!((row.z - o.apogee).abs() < 1e-9);
}

#[test]
fn mass_at_burnout() {
    let d = RocketDesign::example();
    let catalog = Catalog::builtin();
    let motor = catalog.lookup_motor(&d.motor_choice).unwrap();
    let model = FlightModel::new(&d, catalog).unwrap();
    let expected = model.wet_mass() - motor.propellant_mass();
    assert!((model.mass_at(motor.burn_time) - expected).abs() < 1e-9);
    assert!((model.mass_at(motor.burn_time + 10.0) - expected).abs() < 1e-9);

    let (o, trace) = example_flight();
    let tb = o.event(FlightEventKind::Burnout).unwrap().time;
    assert_eq!(tb, motor.burn_time);
    let row = trace.iter().find(|r| r.t == tb).unwrap();
    assert!((row.mass - expected).abs() < 1e-9);
    assert!(trace.iter().all(|r| r.mass >= expected - 1e-9));
}

#[test]
fn trace_keeps_altitude_non_negative() {
    let (_, trace) = example_flight();
    assert!(trace.iter().all(|r| r.z >= -1e-9));
    assert_eq!(trace.last().unwrap().phase, FlightPhase::Landed);
}

#[test]
fn deterministic() {
    let (a, ta) = example_flight();
    let (b, tb) = example_flight();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(ta, tb);
}

#[test]
fn bigger_motor_never_lowers_apogee() {
    let catalog = Catalog::builtin();
    let env = Environment::with_wind("5@E".parse().unwrap());
    let mut flown = Vec::new();
    for m in catalog.motors() {
        let mut d = RocketDesign::example();
        d.motor_choice = m.name.clone();
        if run_drc(&d, catalog).passed {
            let (o, _) = simulate(&d, catalog, &env, &SimSettings::default());
            flown.push((m.name.clone(), m.total_impulse, o.apogee));
        }
    }
    assert!(flown.len() >= 5);
    for (a, ia, ha) in &flown {
        for (b, ib, hb) in &flown {
            if ib > ia {
                assert!(hb >= ha, "{b} ({hb}) below {a} ({ha})");
            }
        }
    }
}

#[test]
fn cancellation_reports_timeout() {
    use std::sync::atomic::AtomicBool;
    let cancel = AtomicBool::new(true);
    let d = RocketDesign::example();
    let (o, _) = simulate_with_cancel(
        &d,
        Catalog::builtin(),
        &Environment::calm(),
        &SimSettings::default(),
        Some(&cancel),
    );
    assert_eq!(o.failure, Some(SimFailure::Timeout));
}

#[test]
fn short_flight_limit_times_out() {
    let d = RocketDesign::example();
    let mut s = SimSettings::default();
    s.limits.max_flight_time = 10.0;
    let (o, _) = simulate(&d, Catalog::builtin(), &Environment::calm(), &s);
    assert_eq!(o.failure, Some(SimFailure::Timeout));
}
