//! Fixed-output time driver shared by the nonlinear solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step-size policy. The solvers compute a stable step from `cfl` and clamp it
/// to `dt_max`; steps are then shortened to land exactly on output times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DtControl {
    pub cfl: f64,
    /// Unbounded by default; JSON writes the unbounded value as `null`.
    #[serde(deserialize_with = "infinite_if_null")]
    pub dt_max: f64,
    pub dt_min: f64,
}

fn infinite_if_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl Default for DtControl {
    fn default() -> Self {
        Self { cfl: 0.4, dt_max: f64::INFINITY, dt_min: 1e-12 }
    }
}

impl DtControl {
    pub fn with_dt_max(dt_max: f64) -> Self {
        Self { dt_max, ..Self::default() }
    }

    pub fn halved(&self, base: f64) -> Self {
        Self { dt_max: 0.5 * self.dt_max.min(base), ..*self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltKind {
    Breaking,
    Cavitation,
}

/// Physical stop of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaltEvent {
    pub kind: HaltKind,
    pub time: f64,
    pub location: f64,
    pub max_gradient: f64,
    /// Blow-up time extrapolated from the gradient history, when available.
    pub estimated_breaking_time: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub states: Vec<S>,
    pub halt: Option<HaltEvent>,
}

impl<S> Trajectory<S> {
    pub fn last(&self) -> &S {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn halted(&self) -> bool {
        self.halt.is_some()
    }
}

pub(crate) trait Stepper {
    type State;

    fn time(&self) -> f64;
    fn set_time(&mut self, t: f64);
    fn snapshot(&self) -> Self::State;
    fn stable_dt(&self, control: &DtControl) -> f64;
    /// Advances by `dt`; `Ok(Some(_))` reports a physical halt.
    fn step(&mut self, dt: f64) -> Result<Option<HaltEvent>>;
}

/// Output times `t0 + m*interval` strictly before `t_end`, then `t_end`.
pub(crate) fn output_times(t0: f64, t_end: f64, interval: Option<f64>) -> Vec<f64> {
    let mut out = Vec::new();
    if let Some(dt) = interval.filter(|d| *d > 0.0) {
        let mut m = 1u64;
        loop {
            let t = t0 + m as f64 * dt;
            if t >= t_end * (1.0 - 1e-14) {
                break;
            }
            out.push(t);
            m += 1;
        }
    }
    if t_end > t0 {
        out.push(t_end);
    }
    out
}

pub(crate) fn drive<S: Stepper>(
    stepper: &mut S,
    t_end: f64,
    interval: Option<f64>,
    control: &DtControl,
) -> Result<Trajectory<S::State>> {
    if !t_end.is_finite() || t_end < stepper.time() {
        return Err(Error::InvalidParameter(format!("t_end = {t_end} is before the initial time {}", stepper.time())));
    }
    let mut states = vec![stepper.snapshot()];
    for target in output_times(stepper.time(), t_end, interval) {
        loop {
            let remaining = target - stepper.time();
            if remaining <= 0.0 {
                break;
            }
            let stable = stepper.stable_dt(control).min(control.dt_max);
            if !(stable > control.dt_min) {
                return Err(Error::StepUnderflow { dt: stable, time: stepper.time() });
            }
            let steps = (remaining / stable).ceil().max(1.0);
            let dt = remaining / steps;
            let landing = steps == 1.0;
            if let Some(halt) = stepper.step(dt)? {
                states.push(stepper.snapshot());
                return Ok(Trajectory { states, halt: Some(halt) });
            }
            if landing {
                stepper.set_time(target);
            }
        }
        states.push(stepper.snapshot());
    }
    Ok(Trajectory { states, halt: None })
}

/// Classical four-stage Runge-Kutta step for `y' = f(t, y)` on a complex state.
pub(crate) fn rk4_step<F>(
    y: &[num_complex::Complex64],
    t: f64,
    dt: f64,
    mut f: F,
) -> Result<Vec<num_complex::Complex64>>
where
    F: FnMut(f64, &[num_complex::Complex64]) -> Result<Vec<num_complex::Complex64>>,
{
    let add = |a: &[num_complex::Complex64], b: &[num_complex::Complex64], s: f64| -> Vec<_> {
        a.iter().zip(b).map(|(x, y)| x + y * s).collect()
    };
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * dt, &add(y, &k1, 0.5 * dt))?;
    let k3 = f(t + 0.5 * dt, &add(y, &k2, 0.5 * dt))?;
    let k4 = f(t + dt, &add(y, &k3, dt))?;
    Ok((0..y.len()).map(|i| y[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0)).collect())
}
