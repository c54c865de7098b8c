//! Saint-Venant system, Riemann invariants, simple waves, the Hopf equation
//! solved along characteristics, and wavebreaking time.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linear::PhysicalParams;
use crate::spectral::{argmax_abs, Grid, SpectralField, Spectrum, Workspace1d};
use crate::time::{self, DtControl, HaltEvent, HaltKind, Stepper, Trajectory};

/// Saint-Venant unknowns: elevation and depth-averaged velocity.
#[derive(Clone, Debug, PartialEq)]
pub struct SvState {
    pub zeta: SpectralField,
    pub u: SpectralField,
    pub time: f64,
}

impl SvState {
    pub fn new(zeta: SpectralField, u: SpectralField, time: f64) -> Result<Self> {
        zeta.grid().ensure_same(u.grid())?;
        Ok(Self { zeta, u, time })
    }

    pub fn at_rest(grid: Grid) -> Self {
        Self { zeta: SpectralField::zeros(grid), u: SpectralField::zeros(grid), time: 0.0 }
    }

    pub fn grid(&self) -> &Grid {
        self.zeta.grid()
    }

    /// Errors with the first node where `H + zeta <= 0`.
    pub fn check_non_cavitation(&self, p: &PhysicalParams) -> Result<()> {
        check_depth(&self.zeta, p)
    }
}

fn check_depth(zeta: &SpectralField, p: &PhysicalParams) -> Result<()> {
    for (i, z) in zeta.values().iter().enumerate() {
        let h = p.depth + z;
        if !(h > 0.0) {
            return Err(Error::Cavitation { depth: h, x: zeta.grid().position(i).0 });
        }
    }
    Ok(())
}

/// Eigenvalues `u.xi - sqrt(gh)|xi|`, `u.xi`, `u.xi + sqrt(gh)|xi|` of the
/// Saint-Venant symbol at one node, for a direction normalized to unit length.
pub fn sv_eigenvalues(zeta: f64, u: &[f64], direction: &[f64], p: &PhysicalParams) -> Result<[f64; 3]> {
    if u.len() != direction.len() || u.is_empty() || u.len() > 2 {
        return Err(Error::InvalidParameter("velocity and direction must both have 1 or 2 components".into()));
    }
    let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::InvalidParameter("direction must be non-zero".into()));
    }
    let h = p.depth + zeta;
    if !(h > 0.0) {
        return Err(Error::Cavitation { depth: h, x: f64::NAN });
    }
    let advect: f64 = u.iter().zip(direction).map(|(a, b)| a * b / norm).sum();
    let c = (p.g * h).sqrt();
    Ok([advect - c, advect, advect + c])
}

/// `r+- = u +- 2 sqrt(g h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannPair {
    pub r_plus: SpectralField,
    pub r_minus: SpectralField,
}

pub fn to_riemann(state: &SvState, p: &PhysicalParams) -> Result<RiemannPair> {
    state.check_non_cavitation(p)?;
    let grid = *state.grid();
    let mut rp = Vec::with_capacity(grid.len());
    let mut rm = Vec::with_capacity(grid.len());
    for (z, u) in state.zeta.values().iter().zip(state.u.values()) {
        let c = 2.0 * (p.g * (p.depth + z)).sqrt();
        rp.push(u + c);
        rm.push(u - c);
    }
    Ok(RiemannPair { r_plus: SpectralField::new(grid, rp)?, r_minus: SpectralField::new(grid, rm)? })
}

/// Inverse of [`to_riemann`]: `u = (r+ + r-)/2`, `h = (r+ - r-)^2 / (16 g)`.
pub fn from_riemann(r: &RiemannPair, p: &PhysicalParams, time: f64) -> Result<SvState> {
    r.r_plus.grid().ensure_same(r.r_minus.grid())?;
    let grid = *r.r_plus.grid();
    let mut zeta = Vec::with_capacity(grid.len());
    let mut u = Vec::with_capacity(grid.len());
    for (node, (a, b)) in r.r_plus.values().iter().zip(r.r_minus.values()).enumerate() {
        if !(a > b) {
            return Err(Error::RiemannOrdering { node });
        }
        u.push(0.5 * (a + b));
        zeta.push((a - b).powi(2) / (16.0 * p.g) - p.depth);
    }
    SvState::new(SpectralField::new(grid, zeta)?, SpectralField::new(grid, u)?, time)
}

/// Elevation of the simple wave carried by `u`: `zeta = (c0 u + u^2/4) / g`.
pub fn simple_wave_elevation(u: &SpectralField, p: &PhysicalParams) -> SpectralField {
    let c0 = p.c0();
    let values = u.values().iter().map(|v| (c0 * v + 0.25 * v * v) / p.g).collect();
    SpectralField::new(*u.grid(), values).expect("same grid")
}

/// Velocity making `r- = -2 sqrt(gH)`: `u = 2 sqrt(g(H + zeta)) - 2 sqrt(gH)`.
pub fn simple_wave_velocity(zeta: &SpectralField, p: &PhysicalParams) -> Result<SpectralField> {
    check_depth(zeta, p)?;
    let c0 = p.c0();
    let values = zeta.values().iter().map(|z| 2.0 * (p.g * (p.depth + z)).sqrt() - 2.0 * c0).collect();
    SpectralField::new(*zeta.grid(), values)
}

/// Initial velocity profile for the Hopf equation.
pub trait Profile {
    fn value(&self, x: f64) -> f64;
    fn slope(&self, x: f64) -> f64;
    /// Points where the slope is scanned for its infimum, in increasing order.
    fn scan_points(&self) -> Vec<f64>;
    /// Period, when the profile lives on a torus.
    fn period(&self) -> Option<f64>;
}

/// Grid samples extended by trigonometric interpolation.
#[derive(Clone, Debug)]
pub struct SampledProfile {
    spectrum: Spectrum,
}

impl SampledProfile {
    pub fn new(u0: &SpectralField) -> Result<Self> {
        if u0.grid().dim() != 1 {
            return Err(Error::InvalidGrid("profiles are one-dimensional".into()));
        }
        Ok(Self { spectrum: u0.spectrum() })
    }
}

impl Profile for SampledProfile {
    fn value(&self, x: f64) -> f64 {
        self.spectrum.evaluate_at(x)
    }

    fn slope(&self, x: f64) -> f64 {
        self.spectrum.derivative_at(x)
    }

    fn scan_points(&self) -> Vec<f64> {
        self.spectrum.grid().coordinates()
    }

    fn period(&self) -> Option<f64> {
        Some(self.spectrum.grid().length())
    }
}

/// Closed-form profile with its derivative.
pub struct AnalyticProfile<F, G> {
    value: F,
    slope: G,
    domain: (f64, f64),
    samples: usize,
    periodic: bool,
}

impl<F, G> AnalyticProfile<F, G>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    /// Profile on the line, scanned over `domain` with `samples` points.
    pub fn on_line(value: F, slope: G, domain: (f64, f64), samples: usize) -> Self {
        Self { value, slope, domain, samples: samples.max(3), periodic: false }
    }

    /// Profile periodic on `[domain.0, domain.1)`.
    pub fn periodic(value: F, slope: G, domain: (f64, f64), samples: usize) -> Self {
        Self { value, slope, domain, samples: samples.max(3), periodic: true }
    }
}

impl<F, G> Profile for AnalyticProfile<F, G>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    fn slope(&self, x: f64) -> f64 {
        (self.slope)(x)
    }

    fn scan_points(&self) -> Vec<f64> {
        let (a, b) = self.domain;
        let n = self.samples;
        if self.periodic {
            (0..n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
        } else {
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        }
    }

    fn period(&self) -> Option<f64> {
        self.periodic.then_some(self.domain.1 - self.domain.0)
    }
}

/// `(x, inf u0')` located by a scan and golden-section refinement; ties go to the smallest `x`.
pub fn steepest_descent_point(u0: &dyn Profile) -> (f64, f64) {
    let pts = u0.scan_points();
    let slopes: Vec<f64> = pts.iter().map(|&x| u0.slope(x)).collect();
    let mut best = 0;
    for (i, s) in slopes.iter().enumerate() {
        if *s < slopes[best] {
            best = i;
        }
    }
    let n = pts.len();
    let h = if n > 1 { pts[1] - pts[0] } else { 1.0 };
    let (lo, hi) = match u0.period() {
        Some(_) => (pts[best] - h, pts[best] + h),
        None => (pts[best.saturating_sub(1)], pts[(best + 1).min(n - 1)]),
    };
    let (x, m) = golden_section_min(|x| u0.slope(x), lo, hi, 1e-14 * (1.0 + hi.abs().max(lo.abs())));
    if m <= slopes[best] {
        (x, m)
    } else {
        (pts[best], slopes[best])
    }
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `T* = -2 / (3 inf u0')`, or infinity for nondecreasing profiles.
pub fn breaking_time(u0: &dyn Profile) -> f64 {
    let (_, m) = steepest_descent_point(u0);
    if m < 0.0 {
        -2.0 / (3.0 * m)
    } else {
        f64::INFINITY
    }
}

/// Straight characteristics `x(t) = x0 + (c0 + 3/2 u0(x0)) t` of the Hopf equation.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicFan {
    pub foot_points: Vec<f64>,
    pub speeds: Vec<f64>,
    pub breaking_time: f64,
}

impl CharacteristicFan {
    pub fn new(u0: &dyn Profile, p: &PhysicalParams, foot_points: Vec<f64>) -> Self {
        let c0 = p.c0();
        let speeds = foot_points.iter().map(|&x| c0 + 1.5 * u0.value(x)).collect();
        Self { foot_points, speeds, breaking_time: breaking_time(u0) }
    }

    pub fn positions_at(&self, t: f64) -> Vec<f64> {
        self.foot_points.iter().zip(&self.speeds).map(|(x, s)| x + s * t).collect()
    }
}

/// Solution of `u_t + (c0 + 3/2 u) u_x = 0` at `t < T*`, by inverting the
/// characteristic map for each query point.
pub fn hopf_characteristic_solve(
    u0: &dyn Profile,
    p: &PhysicalParams,
    t: f64,
    query_points: &[f64],
) -> Result<Vec<f64>> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    let t_star = breaking_time(u0);
    if t >= t_star {
        return Err(Error::Breaking { time: t, breaking_time: t_star });
    }
    let c0 = p.c0();
    let scan = u0.scan_points();
    let (mut umin, mut umax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in &scan {
        let v = u0.value(x);
        umin = umin.min(v);
        umax = umax.max(v);
    }
    let extent = match u0.period() {
        Some(l) => l,
        None => (scan[scan.len() - 1] - scan[0]).abs().max(1.0),
    };
    let tol = 1e-10 * extent;
    let margin = 0.5 * (umax - umin).abs() * 1.5 * t + tol;
    let foot_map = |x0: f64| x0 + (c0 + 1.5 * u0.value(x0)) * t;

    let mut out = Vec::with_capacity(query_points.len());
    for &x in query_points {
        let mut lo = x - (c0 + 1.5 * umax) * t - margin;
        let mut hi = x - (c0 + 1.5 * umin) * t + margin;
        let mut widen = 0;
        while foot_map(lo) > x || foot_map(hi) < x {
            lo -= margin + extent;
            hi += margin + extent;
            widen += 1;
            if widen > 20 {
                return Err(Error::RootFinding(format!("no foot point bracketed for x = {x}")));
            }
        }
        // Monotonicity of the map on the bracket; a decrease means crossing characteristics.
        let probes = 16;
        let mut prev = foot_map(lo);
        for i in 1..=probes {
            let y = foot_map(lo + (hi - lo) * i as f64 / probes as f64);
            if y < prev - tol {
                return Err(Error::Breaking { time: t, breaking_time: t_star });
            }
            prev = y;
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if foot_map(mid) < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(u0.value(0.5 * (lo + hi)));
    }
    Ok(out)
}

/// Halting rules for [`sv_evolve`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BreakingDetector {
    /// Halt once `max |u_x|` exceeds `factor * (initial max |u_x| + 1)`.
    pub blowup_factor: f64,
    /// Halt once the upper third of the retained spectrum of `u` holds more than
    /// this fraction of its energy (the front is no longer resolved).
    pub tail_tolerance: f64,
}

impl Default for BreakingDetector {
    fn default() -> Self {
        Self { blowup_factor: 200.0, tail_tolerance: 1e-6 }
    }
}

/// Pseudospectral RK4 integrator for the 1D Saint-Venant system.
pub struct SvSolver {
    ws: Workspace1d,
    p: PhysicalParams,
    zeta: Vec<Complex64>,
    u: Vec<Complex64>,
    time: f64,
    threshold: f64,
    detector: BreakingDetector,
    history: Vec<(f64, f64)>,
}

impl SvSolver {
    pub fn new(state: &SvState, p: &PhysicalParams, detector: BreakingDetector) -> Result<Self> {
        let p = p.validated()?;
        state.check_non_cavitation(&p)?;
        let ws = Workspace1d::new(*state.grid())?;
        let zeta = ws.forward(state.zeta.values());
        let u = ws.forward(state.u.values());
        let g0 = max_abs(&ws.inverse(&ws.derivative(&u)));
        Ok(Self {
            ws,
            p,
            zeta,
            u,
            time: state.time,
            threshold: detector.blowup_factor * (g0 + 1.0),
            detector,
            history: vec![(state.time, g0)],
        })
    }

    pub fn state(&self) -> SvState {
        SvState { zeta: self.ws.field(&self.zeta), u: self.ws.field(&self.u), time: self.time }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// `(t, max |u_x|)` after every step.
    pub fn gradient_history(&self) -> &[(f64, f64)] {
        &self.history
    }

    pub fn blowup_threshold(&self) -> f64 {
        self.threshold
    }

    fn rhs(&self, y: &[Complex64]) -> Vec<Complex64> {
        let n = self.ws.grid().nodes();
        let (zh, uh) = y.split_at(n);
        let zeta = self.ws.inverse(zh);
        let u = self.ws.inverse(uh);
        let ux = self.ws.inverse(&self.ws.derivative(uh));
        let zu = self.ws.dealiased_product(&zeta, &u);
        let uux = self.ws.dealiased_product(&u, &ux);
        let ik = self.ws.ik();
        let h = self.p.depth;
        let g = self.p.g;
        let mut out = Vec::with_capacity(2 * n);
        out.extend((0..n).map(|i| -ik[i] * (uh[i] * h + zu[i])));
        out.extend((0..n).map(|i| -ik[i] * g * zh[i] - uux[i]));
        out
    }

    /// Linear fit of `1 / max|u_x|` over the second half of the history, extrapolated to zero.
    pub fn extrapolated_breaking_time(&self) -> Option<f64> {
        let t_end = self.history.last()?.0;
        let t_start = self.history.first()?.0;
        let cut = t_start + 0.5 * (t_end - t_start);
        let pts: Vec<(f64, f64)> =
            self.history.iter().filter(|(t, g)| *t >= cut && *g > 0.0).map(|(t, g)| (*t, 1.0 / g)).collect();
        if pts.len() < 3 {
            return None;
        }
        let n = pts.len() as f64;
        let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
        let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
        let slope = sty / stt;
        if !(slope < 0.0) {
            return None;
        }
        Some(mt - my / slope)
    }

    fn halt(&self, kind: HaltKind, ux: &[f64]) -> HaltEvent {
        let i = argmax_abs(ux);
        HaltEvent {
            kind,
            time: self.time,
            location: self.ws.grid().position(i).0,
            max_gradient: ux[i].abs(),
            estimated_breaking_time: self.extrapolated_breaking_time(),
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl Stepper for SvSolver {
    type State = SvState;

    fn time(&self) -> f64 {
        self.time
    }

    fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    fn snapshot(&self) -> SvState {
        self.state()
    }

    fn stable_dt(&self, control: &DtControl) -> f64 {
        let zeta = self.ws.inverse(&self.zeta);
        let u = self.ws.inverse(&self.u);
        let speed = zeta
            .iter()
            .zip(&u)
            .map(|(z, v)| v.abs() + (self.p.g * (self.p.depth + z).max(0.0)).sqrt())
            .fold(0.0, f64::max);
        control.cfl * self.ws.grid().spacing() / speed.max(f64::MIN_POSITIVE)
    }

    fn step(&mut self, dt: f64) -> Result<Option<HaltEvent>> {
        let n = self.ws.grid().nodes();
        let mut y = self.zeta.clone();
        y.extend_from_slice(&self.u);
        let next = time::rk4_step(&y, self.time, dt, |_, v| Ok(self.rhs(v)))?;
        self.zeta = next[..n].to_vec();
        self.u = next[n..].to_vec();
        self.time += dt;

        let ux = self.ws.inverse(&self.ws.derivative(&self.u));
        let gmax = max_abs(&ux);
        self.history.push((self.time, gmax));

        let zeta = self.ws.inverse(&self.zeta);
        if let Some(i) = zeta.iter().position(|z| !(self.p.depth + z > 0.0)) {
            let mut ev = self.halt(HaltKind::Cavitation, &ux);
            ev.location = self.ws.grid().position(i).0;
            return Ok(Some(ev));
        }
        if gmax > self.threshold || self.ws.tail_fraction(&self.u) > self.detector.tail_tolerance {
            return Ok(Some(self.halt(HaltKind::Breaking, &ux)));
        }
        Ok(None)
    }
}

/// Integrates the 1D Saint-Venant system up to `t_end`, recording the state every
/// `snapshot_interval` (and at the end). A breaking or cavitation halt ends the
/// trajectory early with the halt recorded.
pub fn sv_evolve(
    state: &SvState,
    p: &PhysicalParams,
    t_end: f64,
    snapshot_interval: Option<f64>,
    control: &DtControl,
    detector: BreakingDetector,
) -> Result<Trajectory<SvState>> {
    let mut solver = SvSolver::new(state, p, detector)?;
    time::drive(&mut solver, t_end, snapshot_interval, control)
}

impl SvSolver {
    /// One RK4 step of size `dt`, for callers that manage their own clock.
    pub fn advance(&mut self, dt: f64) -> Result<Option<HaltEvent>> {
        self.step(dt)
    }

    pub fn stable_step(&self, control: &DtControl) -> f64 {
        self.stable_dt(control)
    }

    /// `(3 r+ + r-)/4 = u + sqrt(gh)` and `(3 r- + r+)/4 = u - sqrt(gh)` at `x`.
    pub fn characteristic_speeds_at(&self, x: f64) -> (f64, f64) {
        let (z, u) = self.values_at(x);
        let c = (self.p.g * (self.p.depth + z)).sqrt();
        (u + c, u - c)
    }

    /// `(zeta, u)` interpolated at `x`.
    pub fn values_at(&self, x: f64) -> (f64, f64) {
        let grid = *self.ws.grid();
        let z = Spectrum::new(grid, self.zeta.clone()).expect("grid").evaluate_at(x);
        let u = Spectrum::new(grid, self.u.clone()).expect("grid").evaluate_at(x);
        (z, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn earth() -> PhysicalParams {
        PhysicalParams::default()
    }

    const C0: f64 = 3.132_091_952_673_165;

    #[test]
    fn eigenvalues_at_rest_and_moving() {
        let p = earth();
        let ev = sv_eigenvalues(0.0, &[0.0], &[1.0], &p).unwrap();
        assert!((ev[0] + C0).abs() < 1e-14 && ev[1] == 0.0 && (ev[2] - C0).abs() < 1e-14);
        let ev = sv_eigenvalues(0.0, &[1.0], &[1.0], &p).unwrap();
        assert!((ev[0] - (1.0 - C0)).abs() < 1e-14 && ev[1] == 1.0 && (ev[2] - (1.0 + C0)).abs() < 1e-14);
        let ev = sv_eigenvalues(-1.0 + 1e-12, &[0.3], &[1.0], &p).unwrap();
        assert!((ev[0] - 0.3).abs() < 1e-5 && (ev[2] - 0.3).abs() < 1e-5);
        assert!(matches!(sv_eigenvalues(-1.0, &[0.0], &[1.0], &p), Err(Error::Cavitation { .. })));
        // 2D: direction is normalized, transverse velocity only advects.
        let ev = sv_eigenvalues(0.0, &[1.0, 2.0], &[0.0, 3.0], &p).unwrap();
        assert!((ev[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn riemann_rest_state() {
        let p = earth();
        let g = Grid::new_1d(10.0, 16).unwrap();
        let r = to_riemann(&SvState::at_rest(g), &p).unwrap();
        assert!(r.r_plus.values().iter().all(|v| (v - 6.264_183_905_346_33).abs() < 1e-14));
        assert!(r.r_minus.values().iter().all(|v| (v + 6.264_183_905_346_33).abs() < 1e-14));
    }

    #[test]
    fn simple_wave_has_constant_r_minus() {
        let p = earth();
        let g = Grid::new_1d(2.0 * PI, 64).unwrap();
        let u = SpectralField::from_fn(g, |x, _| -0.05 * x.sin());
        let zeta = simple_wave_elevation(&u, &p);
        let r = to_riemann(&SvState::new(zeta.clone(), u.clone(), 0.0).unwrap(), &p).unwrap();
        assert!(r.r_minus.values().iter().all(|v| (v + 2.0 * C0).abs() < 1e-13));
        let back = simple_wave_velocity(&zeta, &p).unwrap();
        assert!(back.max_abs_diff(&u) < 1e-13);
    }

    #[test]
    fn riemann_ordering_violation() {
        let p = earth();
        let g = Grid::new_1d(10.0, 8).unwrap();
        let r = RiemannPair { r_plus: SpectralField::zeros(g), r_minus: SpectralField::zeros(g) };
        assert!(matches!(from_riemann(&r, &p, 0.0), Err(Error::RiemannOrdering { node: 0 })));
    }

    #[test]
    fn breaking_time_examples() {
        let sine = AnalyticProfile::periodic(|x: f64| -x.sin(), |x: f64| -x.cos(), (-PI, PI), 256);
        let t = breaking_time(&sine);
        assert!((t - 2.0 / 3.0).abs() < 1e-15, "{t}");

        // -2/(3 * min u0') with min u0' = -0.1 sqrt(2) e^{-1/2}: 7.7721466053237473 (mpmath).
        let gauss = AnalyticProfile::on_line(
            |x: f64| 0.1 * (-x * x).exp(),
            |x: f64| -0.2 * x * (-x * x).exp(),
            (-10.0, 10.0),
            2001,
        );
        assert!((breaking_time(&gauss) - 7.772_146_605_323_747).abs() < 1e-10);

        // Nondecreasing ramp: a smooth step built from a compact bump.
        let bump = |x: f64| if x.abs() < 1.0 { (-1.0 / (1.0 - x * x)).exp() } else { 0.0 };
        let ramp =
            AnalyticProfile::on_line(|x: f64| x.atan(), move |x: f64| bump(x) + 1.0 / (1.0 + x * x), (-5.0, 5.0), 501);
        assert_eq!(breaking_time(&ramp), f64::INFINITY);
    }

    #[test]
    fn sampled_profile_breaking_time() {
        let g = Grid::new_1d(2.0 * PI, 64).unwrap();
        let u0 = SpectralField::from_fn(g, |x, _| -x.sin());
        let prof = SampledProfile::new(&u0).unwrap();
        assert!((breaking_time(&prof) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn hopf_constant_profile_translates() {
        let p = earth();
        let prof = AnalyticProfile::periodic(|_| 0.7, |_| 0.0, (0.0, 10.0), 16);
        let u = hopf_characteristic_solve(&prof, &p, 5.0, &[0.0, 1.0, 7.5]).unwrap();
        assert!(u.iter().all(|v| *v == 0.7));
    }

    #[test]
    fn hopf_implicit_relation_before_breaking() {
        let p = earth();
        let c0 = p.c0();
        let prof = AnalyticProfile::periodic(|x: f64| -x.sin(), |x: f64| -x.cos(), (-PI, PI), 256);
        let t = 1.0 / 3.0;
        let xs: Vec<f64> = (0..200).map(|i| -PI + 2.0 * PI * i as f64 / 200.0).collect();
        let u = hopf_characteristic_solve(&prof, &p, t, &xs).unwrap();
        for (x, v) in xs.iter().zip(&u) {
            let residual = v + (x - (c0 + 1.5 * v) * t).sin();
            assert!(residual.abs() < 1e-8, "x = {x}: {residual}");
        }
    }

    #[test]
    fn hopf_gradient_blows_up_near_breaking() {
        let p = earth();
        let c0 = p.c0();
        let prof = AnalyticProfile::periodic(|x: f64| -x.sin(), |x: f64| -x.cos(), (-PI, PI), 256);
        let t = (2.0 / 3.0) * (1.0 - 1e-4);
        let center = c0 * t;
        let xs: Vec<f64> = (0..401).map(|i| center - 2e-3 + 4e-3 * i as f64 / 400.0).collect();
        let u = hopf_characteristic_solve(&prof, &p, t, &xs).unwrap();
        let grad =
            xs.windows(2).zip(u.windows(2)).map(|(x, v)| ((v[1] - v[0]) / (x[1] - x[0])).abs()).fold(0.0, f64::max);
        assert!(grad > 1e3, "{grad}");
        assert!(matches!(hopf_characteristic_solve(&prof, &p, 2.0 / 3.0, &[0.0]), Err(Error::Breaking { .. })));
    }

    #[test]
    fn fan_speeds() {
        let p = earth();
        let prof = AnalyticProfile::periodic(|x: f64| -x.sin(), |x: f64| -x.cos(), (-PI, PI), 64);
        let fan = CharacteristicFan::new(&prof, &p, vec![-1.0, 0.0, 1.0]);
        for (x, s) in fan.foot_points.iter().zip(&fan.speeds) {
            assert_eq!(*s, p.c0() + 1.5 * (-x.sin()));
        }
        assert!((fan.breaking_time - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(fan.positions_at(0.0), fan.foot_points);
    }

    #[test]
    fn rest_state_stays_at_rest_and_mass_is_exact() {
        let p = earth();
        let g = Grid::new_1d(2.0 * PI, 64).unwrap();
        let traj =
            sv_evolve(&SvState::at_rest(g), &p, 1.0, None, &DtControl::default(), BreakingDetector::default()).unwrap();
        assert_eq!(traj.last().zeta.max_abs(), 0.0);
        assert_eq!(traj.last().u.max_abs(), 0.0);

        let zeta = SpectralField::from_fn(g, |x, _| 0.1 * (x.cos() + 0.3 * (2.0 * x).sin()));
        let u = SpectralField::from_fn(g, |x, _| 0.05 * x.sin());
        let s = SvState::new(zeta, u, 0.0).unwrap();
        let traj = sv_evolve(&s, &p, 0.5, Some(0.1), &DtControl::default(), BreakingDetector::default()).unwrap();
        let m0 = s.zeta.integral();
        for st in &traj.states {
            assert!((st.zeta.integral() - m0).abs() < 1e-12);
        }
        assert_eq!(traj.states.len(), 6);
        assert!((traj.last().time - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cavitating_initial_state_rejected() {
        let p = earth();
        let g = Grid::new_1d(2.0 * PI, 16).unwrap();
        let s = SvState::new(SpectralField::from_fn(g, |_, _| -1.5), SpectralField::zeros(g), 0.0).unwrap();
        assert!(matches!(
            sv_evolve(&s, &p, 1.0, None, &DtControl::default(), BreakingDetector::default()),
            Err(Error::Cavitation { .. })
        ));
    }

    proptest! {
        #[test]
        fn riemann_round_trip(amp in 0.0f64..0.8, vel in -2.0f64..2.0, phase in 0.0f64..6.0) {
            let p = earth();
            let g = Grid::new_1d(2.0 * PI, 32).unwrap();
            let zeta = SpectralField::from_fn(g, |x, _| amp * (x + phase).sin());
            let u = SpectralField::from_fn(g, |x, _| vel * (2.0 * x - phase).cos());
            let s = SvState::new(zeta, u, 0.0).unwrap();
            let r = to_riemann(&s, &p).unwrap();
            for (a, b) in r.r_plus.values().iter().zip(r.r_minus.values()) {
                prop_assert!(a > b);
            }
            let back = from_riemann(&r, &p, 0.0).unwrap();
            prop_assert!(back.zeta.max_abs_diff(&s.zeta) < 1e-12);
            prop_assert!(back.u.max_abs_diff(&s.u) < 1e-12);
        }
    }
}
