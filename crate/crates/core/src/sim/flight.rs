use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use nalgebra::Vector3;

use super::aero::{parachute_drag, DragModel};
use super::atmosphere::Atmosphere;
use super::{
    Environment, FlightEvent, FlightEventKind, FlightOutcome, FlightPhase, MaxQState, SimFailure, SimSettings,
    StartPhase, TraceRow,
};
use crate::catalog::{Catalog, ThrustProfile};
use crate::design::{RocketDesign, Trigger};
use crate::geometry::MassBreakdown;

/// Everything about a design the integrator needs, resolved once.
#[derive(Debug, Clone)]
pub struct FlightModel {
    pub drag: DragModel,
    pub thrust: ThrustProfile,
    pub dry_mass: f64,
    pub propellant_mass: f64,
    rail_direction: Vector3<f64>,
    rail_length: f64,
    drogue: ChuteSpec,
    main: ChuteSpec,
}

#[derive(Debug, Clone, Copy)]
struct ChuteSpec {
    cd_s: f64,
    trigger: Trigger,
    lag: f64,
}

impl FlightModel {
    pub fn new(design: &RocketDesign, catalog: &Catalog) -> Option<FlightModel> {
        let motor = catalog.lookup_motor(&design.motor_choice).ok()?;
        let masses = MassBreakdown::of(design, catalog).ok()?;
        let incl = design.launch.inclination.to_radians();
        let head = design.launch.heading.to_radians();
        let chute = |p: &crate::design::Parachute| ChuteSpec {
            cd_s: p.cd_s,
            trigger: p.trigger,
            lag: p.lag,
        };
        Some(FlightModel {
            drag: DragModel::new(design),
            thrust: motor.thrust_profile(),
            dry_mass: masses.dry(),
            propellant_mass: masses.propellant,
            rail_direction: Vector3::new(incl.cos() * head.sin(), incl.cos() * head.cos(), incl.sin()),
            rail_length: design.launch.rail_length,
            drogue: chute(&design.parachutes.drogue),
            main: chute(&design.parachutes.main),
        })
    }

    /// Vehicle mass with propellant depleted in proportion to delivered impulse.
    pub fn mass_at(&self, t: f64) -> f64 {
        self.dry_mass + self.propellant_mass * self.thrust.remaining_fraction(t)
    }

    pub fn wet_mass(&self) -> f64 {
        self.dry_mass + self.propellant_mass
    }
}

#[derive(Debug, Clone, Copy)]
struct State {
    p: Vector3<f64>,
    v: Vector3<f64>,
}

impl State {
    fn offset(&self, k: &Deriv, h: f64) -> State {
        State {
            p: self.p + k.dp * h,
            v: self.v + k.dv * h,
        }
    }

    fn is_finite(&self) -> bool {
        self.p.iter().chain(self.v.iter()).all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, Copy)]
struct Deriv {
    dp: Vector3<f64>,
    dv: Vector3<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Aero {
    Body,
    Chute(f64),
}

/// Per-phase force configuration used by the derivative.
#[derive(Debug, Clone, Copy)]
struct Forces {
    on_rail: bool,
    aero: Aero,
}

struct Integrator<'a> {
    model: &'a FlightModel,
    atmosphere: Atmosphere,
    wind: Vector3<f64>,
    gravity: f64,
    settings: &'a SimSettings,
    fixed_mass: Option<f64>,
    /// Motor burning from t = 0. Off for flights started mid-air.
    powered: bool,
}

struct Loads {
    thrust: f64,
    drag: f64,
}

impl Integrator<'_> {
    fn mass(&self, t: f64) -> f64 {
        match self.fixed_mass {
            Some(m) => m,
            None if self.powered => self.model.mass_at(t),
            None if self.settings.initial.is_some() => self.model.dry_mass,
            None => self.model.wet_mass(),
        }
    }

    fn thrust(&self, t: f64) -> f64 {
        if self.powered {
            self.model.thrust.thrust_at(t)
        } else {
            0.0
        }
    }

    fn aero_force(&self, s: &State, forces: Forces) -> Vector3<f64> {
        let air = self.atmosphere.at(s.p.z);
        let v_rel = s.v - self.wind;
        match forces.aero {
            Aero::Body if self.settings.physics.body_drag => self.model.drag.body_drag(&v_rel, &air),
            Aero::Body => Vector3::zeros(),
            Aero::Chute(cd_s) => parachute_drag(cd_s, &v_rel, &air),
        }
    }

    fn loads(&self, t: f64, s: &State, forces: Forces) -> Loads {
        Loads {
            thrust: self.thrust(t),
            drag: self.aero_force(s, forces).norm(),
        }
    }

    fn deriv(&self, t: f64, s: &State, forces: Forces) -> Deriv {
        let m = self.mass(t);
        let thrust = self.thrust(t);
        let u = self.model.rail_direction;
        let aero = self.aero_force(s, forces);
        let gravity = Vector3::new(0.0, 0.0, -self.gravity * m);
        if forces.on_rail {
            let along = (thrust * u + aero + gravity).dot(&u) / m;
            let speed = s.v.dot(&u);
            let a = if speed <= 0.0 && along < 0.0 { 0.0 } else { along };
            return Deriv { dp: s.v, dv: a * u };
        }
        let v_rel = s.v - self.wind;
        let dir = if v_rel.norm() > 1e-9 { v_rel.normalize() } else { u };
        Deriv {
            dp: s.v,
            dv: (thrust * dir + aero + gravity) / m,
        }
    }

    fn rk4(&self, t: f64, s: &State, h: f64, forces: Forces) -> State {
        let k1 = self.deriv(t, s, forces);
        let k2 = self.deriv(t + 0.5 * h, &s.offset(&k1, 0.5 * h), forces);
        let k3 = self.deriv(t + 0.5 * h, &s.offset(&k2, 0.5 * h), forces);
        let k4 = self.deriv(t + h, &s.offset(&k3, h), forces);
        let mut next = State {
            p: s.p + (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp) * (h / 6.0),
            v: s.v + (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv) * (h / 6.0),
        };
        if forces.on_rail {
            // Project back onto the rail and forbid sliding backwards.
            let u = self.model.rail_direction;
            let d = next.p.dot(&u).max(0.0);
            let speed = next.v.dot(&u).max(0.0);
            next.p = d * u;
            next.v = speed * u;
        }
        next
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum StateEvent {
    RailExit,
    Apogee,
    DrogueAltitude,
    MainAltitude,
    Ground,
}

#[derive(Debug, Clone, Copy, Default)]
struct ChuteStatus {
    triggered_at: Option<f64>,
    deploy_at: Option<f64>,
    deployed: bool,
}

struct Flight<'a> {
    it: Integrator<'a>,
    t: f64,
    s: State,
    phase: FlightPhase,
    apogee_reached: bool,
    apogee: f64,
    apogee_time: Option<f64>,
    max_z: f64,
    rail_exit_velocity: Option<f64>,
    drogue: ChuteStatus,
    main: ChuteStatus,
    max_q: MaxQState,
    events: Vec<FlightEvent>,
    trace: Vec<TraceRow>,
}

impl Flight<'_> {
    fn forces(&self) -> Forces {
        Forces {
            on_rail: self.phase == FlightPhase::OnRail,
            aero: match self.phase {
                FlightPhase::Drogue => Aero::Chute(self.it.model.drogue.cd_s),
                FlightPhase::Main => Aero::Chute(self.it.model.main.cd_s),
                _ => Aero::Body,
            },
        }
    }

    fn record(&mut self, kind: FlightEventKind) {
        self.events.push(FlightEvent {
            kind,
            time: self.t,
            altitude: self.s.p.z,
        });
    }

    fn event_value(&self, event: StateEvent, s: &State) -> f64 {
        match event {
            StateEvent::RailExit => self.it.model.rail_length - s.p.dot(&self.it.model.rail_direction),
            StateEvent::Apogee => s.v.z,
            StateEvent::DrogueAltitude => match self.it.model.drogue.trigger {
                Trigger::Altitude(h) => s.p.z - h,
                Trigger::Apogee => f64::NAN,
            },
            StateEvent::MainAltitude => match self.it.model.main.trigger {
                Trigger::Altitude(h) => s.p.z - h,
                Trigger::Apogee => f64::NAN,
            },
            StateEvent::Ground => s.p.z,
        }
    }

    fn active_events(&self) -> Vec<StateEvent> {
        let mut out = Vec::with_capacity(4);
        let free = self.phase != FlightPhase::OnRail;
        if !free {
            out.push(StateEvent::RailExit);
            return out;
        }
        if !self.apogee_reached {
            out.push(StateEvent::Apogee);
        }
        let chutes = self.it.settings.physics.parachutes;
        if chutes && self.apogee_reached && self.drogue.triggered_at.is_none() {
            if let Trigger::Altitude(_) = self.it.model.drogue.trigger {
                out.push(StateEvent::DrogueAltitude);
            }
        }
        if chutes && self.drogue.triggered_at.is_some() && self.main.triggered_at.is_none() {
            if let Trigger::Altitude(_) = self.it.model.main.trigger {
                out.push(StateEvent::MainAltitude);
            }
        }
        out.push(StateEvent::Ground);
        out
    }

    /// Earliest fraction of the step at which `event` crosses to `<= 0`.
    fn locate(&self, event: StateEvent, h: f64, end: &State) -> Option<f64> {
        let g0 = self.event_value(event, &self.s);
        let g1 = self.event_value(event, end);
        if !(g0 > 0.0 && g1 <= 0.0) {
            return None;
        }
        let forces = self.forces();
        let (mut lo, mut hi) = (0.0, h);
        let tol = self.it.settings.steps.event_tolerance;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let s = self.it.rk4(self.t, &self.s, mid, forces);
            if self.event_value(event, &s) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    fn next_scheduled(&self) -> f64 {
        let mut next = self.it.settings.limits.max_flight_time;
        if self.it.powered {
            for b in self.it.model.thrust.breakpoints() {
                if b > self.t && b < next {
                    next = b;
                }
            }
        }
        for c in [&self.drogue, &self.main] {
            if let (Some(at), false) = (c.deploy_at, c.deployed) {
                if at > self.t && at < next {
                    next = at;
                }
            }
        }
        next
    }

    fn observe(&mut self) {
        let air = self.it.atmosphere.at(self.s.p.z);
        let airspeed = (self.s.v - self.it.wind).norm();
        let q = 0.5 * air.density * airspeed * airspeed;
        if q > self.max_q.dynamic_pressure {
            let loads = self.it.loads(self.t, &self.s, self.forces());
            self.max_q = MaxQState {
                dynamic_pressure: q,
                time: self.t,
                altitude: self.s.p.z,
                airspeed,
                mach: airspeed / air.speed_of_sound,
                thrust: loads.thrust,
                drag: loads.drag,
                mass: self.it.mass(self.t),
                ambient_pressure: air.pressure,
                speed_of_sound: air.speed_of_sound,
            };
        }
        if self.s.p.z > self.max_z {
            self.max_z = self.s.p.z;
        }
        if self.it.settings.trace {
            self.trace.push(TraceRow {
                t: self.t,
                x: self.s.p.x,
                y: self.s.p.y,
                z: self.s.p.z,
                vx: self.s.v.x,
                vy: self.s.v.y,
                vz: self.s.v.z,
                mass: self.it.mass(self.t),
                phase: self.phase,
            });
        }
    }

    fn handle(&mut self, event: StateEvent) {
        match event {
            StateEvent::RailExit => {
                self.rail_exit_velocity = Some(self.s.v.norm());
                self.phase = if self.it.thrust(self.t) > 0.0 {
                    FlightPhase::Powered
                } else {
                    FlightPhase::Coast
                };
                self.record(FlightEventKind::RailExit);
            }
            StateEvent::Apogee => {
                self.apogee_reached = true;
                self.apogee = self.s.p.z;
                self.apogee_time = Some(self.t);
                self.record(FlightEventKind::Apogee);
            }
            StateEvent::DrogueAltitude | StateEvent::MainAltitude => {}
            StateEvent::Ground => {
                self.s.p.z = 0.0;
                self.phase = FlightPhase::Landed;
                self.record(FlightEventKind::Touchdown);
            }
        }
    }

    /// Fires triggers whose conditions hold and deploys chutes whose lag elapsed.
    fn update_recovery(&mut self) {
        if !self.it.settings.physics.parachutes || self.phase == FlightPhase::Landed {
            return;
        }
        let z = self.s.p.z;
        let holds = |trigger: Trigger| match trigger {
            Trigger::Apogee => true,
            Trigger::Altitude(h) => z <= h,
        };
        if self.drogue.triggered_at.is_none() && self.apogee_reached && holds(self.it.model.drogue.trigger) {
            self.drogue.triggered_at = Some(self.t);
            self.drogue.deploy_at = Some(self.t + self.it.model.drogue.lag);
            self.record(FlightEventKind::DrogueTrigger);
        }
        if let (Some(_), None) = (self.drogue.triggered_at, self.main.triggered_at) {
            if holds(self.it.model.main.trigger) {
                self.main.triggered_at = Some(self.t);
                let own = self.t + self.it.model.main.lag;
                self.main.deploy_at = Some(own.max(self.drogue.deploy_at.unwrap_or(own)));
                self.record(FlightEventKind::MainTrigger);
            }
        }
        if let (Some(at), false) = (self.drogue.deploy_at, self.drogue.deployed) {
            if self.t >= at - 1e-12 {
                self.drogue.deployed = true;
                self.phase = FlightPhase::Drogue;
                self.record(FlightEventKind::DrogueDeploy);
            }
        }
        if let (Some(at), false) = (self.main.deploy_at, self.main.deployed) {
            if self.t >= at - 1e-12 {
                self.main.deployed = true;
                self.phase = FlightPhase::Main;
                self.record(FlightEventKind::MainDeploy);
            }
        }
    }

    fn finish(self, failure: Option<SimFailure>) -> (FlightOutcome, Vec<TraceRow>) {
        let x = self.s.p.x;
        let y = self.s.p.y;
        let apogee = if self.apogee_reached { self.apogee } else { self.max_z }.max(0.0);
        let outcome = FlightOutcome {
            apogee,
            apogee_time: self.apogee_time,
            flight_time: self.t,
            landing_x: x,
            landing_y: y,
            horizontal_distance: (x * x + y * y).sqrt(),
            impact_velocity: if self.phase == FlightPhase::Landed {
                self.s.v.norm()
            } else {
                0.0
            },
            rail_exit_velocity: self.rail_exit_velocity,
            max_q: self.max_q,
            events: self.events,
            structural_failure: false,
            total_cost: 0.0,
            failure,
        };
        (outcome, self.trace)
    }
}

/// Integrates one flight. The design is expected to have passed DRC; a
/// design whose motor or materials do not resolve returns a `drc_failed`
/// outcome. `structural_failure` and `total_cost` are left for the
/// structures and cost modules.
pub fn simulate(
    design: &RocketDesign,
    catalog: &Catalog,
    env: &Environment,
    settings: &SimSettings,
) -> (FlightOutcome, Vec<TraceRow>) {
    simulate_with_cancel(design, catalog, env, settings, None)
}

/// As [`simulate`], checking `cancel` between integration steps. A
/// cancelled flight is reported as a timeout.
pub fn simulate_with_cancel(
    design: &RocketDesign,
    catalog: &Catalog,
    env: &Environment,
    settings: &SimSettings,
    cancel: Option<&AtomicBool>,
) -> (FlightOutcome, Vec<TraceRow>) {
    let Some(model) = FlightModel::new(design, catalog) else {
        return (FlightOutcome::not_flown(SimFailure::DrcFailed), Vec::new());
    };
    let (s, phase, fixed_mass) = match settings.initial {
        Some(init) => (
            State {
                p: Vector3::from(init.position),
                v: Vector3::from(init.velocity),
            },
            match init.phase {
                StartPhase::Free => FlightPhase::Coast,
                StartPhase::Drogue => FlightPhase::Drogue,
                StartPhase::Main => FlightPhase::Main,
            },
            init.mass,
        ),
        None => (
            State {
                p: Vector3::zeros(),
                v: Vector3::zeros(),
            },
            FlightPhase::OnRail,
            None,
        ),
    };
    let mut f = Flight {
        it: Integrator {
            model: &model,
            atmosphere: Atmosphere::new(env.atmosphere),
            wind: env.wind.velocity(),
            gravity: env.gravity,
            settings,
            fixed_mass,
            powered: settings.physics.thrust && settings.initial.is_none(),
        },
        t: 0.0,
        s,
        phase,
        apogee_reached: false,
        apogee: 0.0,
        apogee_time: None,
        max_z: s.p.z,
        rail_exit_velocity: None,
        drogue: ChuteStatus::default(),
        main: ChuteStatus::default(),
        max_q: MaxQState::default(),
        events: Vec::new(),
        trace: Vec::new(),
    };
    if let Some(init) = settings.initial {
        if init.phase != StartPhase::Free {
            // Recovery already under way: both triggers count as fired.
            f.apogee_reached = true;
            f.apogee = init.position[2];
            f.drogue = ChuteStatus {
                triggered_at: Some(0.0),
                deploy_at: Some(0.0),
                deployed: true,
            };
            if init.phase == StartPhase::Main {
                f.main = f.drogue;
            }
        }
    } else {
        f.record(FlightEventKind::Liftoff);
    }
    f.observe();

    let started = Instant::now();
    let mut burnout_recorded = !f.it.powered;
    let mut steps: u64 = 0;
    loop {
        if f.phase == FlightPhase::Landed {
            break;
        }
        if f.t >= settings.limits.max_flight_time {
            return f.finish(Some(SimFailure::Timeout));
        }
        steps += 1;
        if steps % 256 == 0 {
            let cancelled = cancel.is_some_and(|c| c.load(Ordering::Relaxed));
            let over_budget = settings
                .limits
                .max_wall_time
                .is_some_and(|limit| started.elapsed().as_secs_f64() > limit);
            if cancelled || over_budget {
                return f.finish(Some(SimFailure::Timeout));
            }
        }

        // A rocket still sitting on the rail after the motor is spent never flies.
        let spent = !f.it.powered || f.t >= model.thrust.burn_time;
        if f.phase == FlightPhase::OnRail && spent && f.s.v.norm() == 0.0 {
            f.phase = FlightPhase::Landed;
            f.record(FlightEventKind::Touchdown);
            break;
        }

        let nominal = if f.apogee_reached {
            settings.steps.descent
        } else {
            settings.steps.ascent
        };
        let scheduled = f.next_scheduled();
        let (h, lands_on_schedule) = if scheduled - f.t <= nominal {
            (scheduled - f.t, true)
        } else {
            (nominal, false)
        };
        let forces = f.forces();
        let end = f.it.rk4(f.t, &f.s, h, forces);
        if !end.is_finite() {
            return f.finish(Some(SimFailure::NumericDivergence));
        }

        let mut earliest: Option<(f64, StateEvent)> = None;
        for event in f.active_events() {
            if let Some(tau) = f.locate(event, h, &end) {
                if earliest.is_none_or(|(best, _)| tau < best) {
                    earliest = Some((tau, event));
                }
            }
        }

        match earliest {
            Some((tau, event)) => {
                f.s = if tau == h {
                    end
                } else {
                    f.it.rk4(f.t, &f.s, tau, forces)
                };
                f.t = if tau == h && lands_on_schedule {
                    scheduled
                } else {
                    f.t + tau
                };
                f.handle(event);
            }
            None => {
                f.s = end;
                f.t = if lands_on_schedule { scheduled } else { f.t + h };
            }
        }

        if !burnout_recorded && f.t >= model.thrust.burn_time {
            burnout_recorded = true;
            f.record(FlightEventKind::Burnout);
            if f.phase == FlightPhase::Powered {
                f.phase = FlightPhase::Coast;
            }
        }
        f.update_recovery();
        f.observe();
    }
    f.finish(None)
}
