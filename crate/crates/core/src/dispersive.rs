//! abcd-Boussinesq systems, the Korteweg-de Vries equation and the two
//! Whitham equations in one dimension.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{phase_velocity, PhysicalParams};
use crate::spectral::{Grid, Multiplier, SpectralField, Workspace1d};
use crate::time::{self, DtControl, HaltEvent, HaltKind, Stepper, Trajectory};

/// Boussinesq parameters with `a + b + c + d = 1/3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbcdParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl AbcdParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self { a, b, c, d }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let all = [self.a, self.b, self.c, self.d];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("abcd parameters must be finite".into()));
        }
        let sum: f64 = all.iter().sum();
        if (sum - 1.0 / 3.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("a + b + c + d = {sum}, expected 1/3")));
        }
        Ok(self)
    }

    /// `ω² / (gH k²)` as a function of `s = (Hk)²`, or `None` at a pole.
    fn ratio(&self, s: f64) -> Option<f64> {
        let den = (1.0 + self.b * s) * (1.0 + self.d * s);
        if den == 0.0 {
            return None;
        }
        Some((1.0 - self.a * s) * (1.0 - self.c * s) / den)
    }
}

/// `ω²(k) = gHk² (1 - a(Hk)²)(1 - c(Hk)²) / ((1 + b(Hk)²)(1 + d(Hk)²))`.
pub fn abcd_symbol(k: f64, params: &AbcdParams, p: &PhysicalParams) -> Result<f64> {
    let s = (p.depth * k).powi(2);
    match params.ratio(s) {
        Some(r) => Ok(p.g * p.depth * k * k * r),
        None => Err(Error::SingularSymbol { k }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    WellPosed,
    IllPosed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellPosednessVerdict {
    pub verdict: Verdict,
    /// Onset of the instability: the smallest sampled `k` with `ω² < 0`, or a pole.
    pub witness_wavenumber: Option<f64>,
    /// Minimum of `ω²` over the sampled wavenumbers (`-inf` when a pole is crossed).
    pub omega_squared_min: f64,
}

const CLASSIFY_SAMPLES: usize = 2001;

/// Linear well-posedness of the abcd system about the rest state.
pub fn classify_abcd(params: &AbcdParams, p: &PhysicalParams) -> WellPosednessVerdict {
    let h = p.depth;
    let ks: Vec<f64> =
        (0..CLASSIFY_SAMPLES).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (CLASSIFY_SAMPLES - 1) as f64) / h).collect();

    // A real pole of the elliptic factors: 1 + b s = 0 or 1 + d s = 0 with s > 0.
    let poles: Vec<f64> = [params.b, params.d].iter().filter(|v| **v < 0.0).map(|v| (-1.0 / v).sqrt() / h).collect();
    if let Some(pole) = poles.iter().cloned().reduce(f64::min) {
        // The symbol changes sign across a simple pole; report the negative side.
        let k = [pole * (1.0 - 1e-6), pole * (1.0 + 1e-6)]
            .into_iter()
            .find(|&k| abcd_symbol(k, params, p).is_ok_and(|w| w < 0.0))
            .unwrap_or(pole);
        return WellPosednessVerdict {
            verdict: Verdict::IllPosed,
            witness_wavenumber: Some(k),
            omega_squared_min: f64::NEG_INFINITY,
        };
    }

    let mut omega_squared_min = f64::INFINITY;
    let mut first_negative = None;
    for (i, &k) in ks.iter().enumerate() {
        let w2 = abcd_symbol(k, params, p).unwrap_or(f64::NEG_INFINITY);
        omega_squared_min = omega_squared_min.min(w2);
        if w2 < 0.0 && first_negative.is_none() {
            first_negative = Some(i);
        }
    }

    // Sign changes of the ratio can only happen at s = 1/a or s = 1/c; probe every interval.
    let mut crit: Vec<f64> = [params.a, params.c].iter().filter(|v| **v > 0.0).map(|v| 1.0 / v).collect();
    crit.sort_by(f64::total_cmp);
    let mut probes = Vec::new();
    let mut prev = 0.0;
    for &s in &crit {
        probes.push(0.5 * (prev + s));
        prev = s;
    }
    probes.push(if prev > 0.0 { 2.0 * prev } else { 1.0 });
    let interval_negative = probes.iter().find(|&&s| params.ratio(s).is_some_and(|r| r < 0.0)).copied();
    let asymptotic_negative = asymptotic_sign(params) < 0.0;

    let witness = match (first_negative, interval_negative) {
        (Some(i), _) => Some(refine_onset(params, p, if i == 0 { 0.0 } else { ks[i - 1] }, ks[i])),
        (None, Some(s)) => Some(s.sqrt() / h),
        (None, None) if asymptotic_negative => Some(ks[CLASSIFY_SAMPLES - 1]),
        _ => None,
    };
    match witness {
        Some(k) => WellPosednessVerdict {
            verdict: Verdict::IllPosed,
            witness_wavenumber: Some(k),
            omega_squared_min: omega_squared_min.min(abcd_symbol(k, params, p).unwrap_or(f64::NEG_INFINITY)),
        },
        None => WellPosednessVerdict { verdict: Verdict::WellPosed, witness_wavenumber: None, omega_squared_min },
    }
}

/// Sign of `ω²/(gHk²)` as `k → ∞`, from the leading powers of numerator and denominator.
fn asymptotic_sign(params: &AbcdParams) -> f64 {
    let lead = |x: f64, y: f64, sign: f64| -> f64 {
        match (x != 0.0, y != 0.0) {
            (true, true) => x * y,
            (true, false) => sign * x,
            (false, true) => sign * y,
            (false, false) => 1.0,
        }
    };
    let num = lead(params.a, params.c, -1.0);
    let den = lead(params.b, params.d, 1.0);
    (num / den).signum()
}

/// Bisection for the sign change of `ω²` in `(lo, hi]`; returns a point with `ω² < 0`.
fn refine_onset(params: &AbcdParams, p: &PhysicalParams, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if abcd_symbol(mid, params, p).map_or(true, |w| w < 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoussinesqState {
    pub zeta: SpectralField,
    pub u: SpectralField,
    pub time: f64,
}

impl BoussinesqState {
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
}

fn first_dry_node(zeta: &[f64], depth: f64) -> Option<usize> {
    zeta.iter().position(|z| !(depth + z > 0.0))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Mode-wise coefficients of the linearized abcd system:
/// `ζ̂_t = α û`, `û_t = β ζ̂`.
fn abcd_linear_coefficients(
    ws: &Workspace1d,
    params: &AbcdParams,
    p: &PhysicalParams,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let h = p.depth;
    ws.wavenumbers()
        .iter()
        .zip(ws.ik())
        .map(|(&k, &ik)| {
            let s = (h * k).powi(2);
            let alpha = -ik * h * (1.0 - params.a * s) / (1.0 + params.b * s);
            let beta = -ik * p.g * (1.0 - params.c * s) / (1.0 + params.d * s);
            (alpha, beta)
        })
        .unzip()
}

/// Exact solution of the abcd system linearized about rest.
pub fn abcd_linear_evolve(
    state: &BoussinesqState,
    params: &AbcdParams,
    p: &PhysicalParams,
    t: f64,
) -> Result<BoussinesqState> {
    let params = check_evolvable(params, p)?;
    let ws = Workspace1d::new(*state.grid())?;
    let (alpha, beta) = abcd_linear_coefficients(&ws, &params, p);
    let z0 = ws.forward(state.zeta.values());
    let u0 = ws.forward(state.u.values());
    let mut z = Vec::with_capacity(z0.len());
    let mut u = Vec::with_capacity(z0.len());
    for i in 0..z0.len() {
        // αβ = -ω² ≤ 0 for well-posed parameters.
        let w = (-(alpha[i] * beta[i]).re).max(0.0).sqrt();
        let (cos, sinc) = if w == 0.0 { (1.0, t) } else { ((w * t).cos(), (w * t).sin() / w) };
        z.push(z0[i] * cos + alpha[i] * u0[i] * sinc);
        u.push(u0[i] * cos + beta[i] * z0[i] * sinc);
    }
    BoussinesqState::new(ws.field(&z), ws.field(&u), state.time + t)
}

fn check_evolvable(params: &AbcdParams, p: &PhysicalParams) -> Result<AbcdParams> {
    let params = params.validated()?;
    if params.b < 0.0 || params.d < 0.0 {
        return Err(Error::IllPosed(format!("b = {} and d = {} must be non-negative", params.b, params.d)));
    }
    let verdict = classify_abcd(&params, p);
    if verdict.verdict == Verdict::IllPosed {
        return Err(Error::IllPosed(format!("omega^2 < 0 at k = {}", verdict.witness_wavenumber.unwrap_or(f64::NAN))));
    }
    Ok(params)
}

/// Pseudospectral RK4 integrator for the 1D abcd system.
pub struct AbcdSolver {
    ws: Workspace1d,
    p: PhysicalParams,
    zeta: Vec<Complex64>,
    u: Vec<Complex64>,
    time: f64,
    inv_b: Vec<f64>,
    inv_d: Vec<f64>,
    a_term: Vec<f64>,
    c_term: Vec<f64>,
    omega_max: f64,
}

impl AbcdSolver {
    pub fn new(state: &BoussinesqState, params: &AbcdParams, p: &PhysicalParams) -> Result<Self> {
        let p = p.validated()?;
        let params = check_evolvable(params, &p)?;
        if let Some(i) = first_dry_node(state.zeta.values(), p.depth) {
            return Err(Error::Cavitation { depth: p.depth + state.zeta.values()[i], x: state.grid().position(i).0 });
        }
        let ws = Workspace1d::new(*state.grid())?;
        let h = p.depth;
        let s: Vec<f64> = ws.wavenumbers().iter().map(|k| (h * k).powi(2)).collect();
        let omega_max = ws
            .wavenumbers()
            .iter()
            .map(|&k| abcd_symbol(k, &params, &p).map(|w| w.max(0.0).sqrt()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(Self {
            zeta: ws.forward(state.zeta.values()),
            u: ws.forward(state.u.values()),
            time: state.time,
            inv_b: s.iter().map(|s| 1.0 / (1.0 + params.b * s)).collect(),
            inv_d: s.iter().map(|s| 1.0 / (1.0 + params.d * s)).collect(),
            a_term: s.iter().map(|s| params.a * h * s).collect(),
            c_term: s.iter().map(|s| 1.0 - params.c * s).collect(),
            omega_max,
            ws,
            p,
        })
    }

    pub fn state(&self) -> BoussinesqState {
        BoussinesqState { zeta: self.ws.field(&self.zeta), u: self.ws.field(&self.u), time: self.time }
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
        let (h, g) = (self.p.depth, self.p.g);
        let mut out = Vec::with_capacity(2 * n);
        // hu + aH³u_xx = Hu + ζu - aH(Hk)²u in Fourier space.
        out.extend((0..n).map(|i| -ik[i] * (uh[i] * (h - self.a_term[i]) + zu[i]) * self.inv_b[i]));
        out.extend((0..n).map(|i| (-ik[i] * g * self.c_term[i] * zh[i] - uux[i]) * self.inv_d[i]));
        out
    }
}

impl Stepper for AbcdSolver {
    type State = BoussinesqState;

    fn time(&self) -> f64 {
        self.time
    }

    fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    fn snapshot(&self) -> BoussinesqState {
        self.state()
    }

    fn stable_dt(&self, control: &DtControl) -> f64 {
        let u = self.ws.inverse(&self.u);
        let speed = self.p.c0() + 1.5 * max_abs(&u);
        let advective = control.cfl * self.ws.grid().spacing() / speed;
        // RK4 covers |ω dt| ≤ 2√2 on the imaginary axis.
        let linear = if self.omega_max > 0.0 { 2.5 / self.omega_max } else { f64::INFINITY };
        advective.min(linear)
    }

    fn step(&mut self, dt: f64) -> Result<Option<HaltEvent>> {
        let n = self.ws.grid().nodes();
        let mut y = self.zeta.clone();
        y.extend_from_slice(&self.u);
        let next = time::rk4_step(&y, self.time, dt, |_, v| Ok(self.rhs(v)))?;
        self.zeta = next[..n].to_vec();
        self.u = next[n..].to_vec();
        self.time += dt;
        let zeta = self.ws.inverse(&self.zeta);
        if let Some(i) = first_dry_node(&zeta, self.p.depth) {
            let ux = self.ws.inverse(&self.ws.derivative(&self.u));
            return Ok(Some(HaltEvent {
                kind: HaltKind::Cavitation,
                time: self.time,
                location: self.ws.grid().position(i).0,
                max_gradient: max_abs(&ux),
                estimated_breaking_time: None,
            }));
        }
        Ok(None)
    }
}

/// Integrates the 1D abcd system, recording snapshots every `snapshot_interval` and at `t_end`.
pub fn abcd_evolve(
    state: &BoussinesqState,
    params: &AbcdParams,
    p: &PhysicalParams,
    t_end: f64,
    snapshot_interval: Option<f64>,
    control: &DtControl,
) -> Result<Trajectory<BoussinesqState>> {
    let mut solver = AbcdSolver::new(state, params, p)?;
    time::drive(&mut solver, t_end, snapshot_interval, control)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarModel {
    Kdv,
    Whitham,
    Whitham2,
}

impl ScalarModel {
    pub fn name(&self) -> &'static str {
        match self {
            ScalarModel::Kdv => "kdv",
            ScalarModel::Whitham => "whitham",
            ScalarModel::Whitham2 => "whitham2",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarWaveState {
    pub zeta: SpectralField,
    pub time: f64,
    pub model: ScalarModel,
}

impl ScalarWaveState {
    pub fn new(zeta: SpectralField, time: f64, model: ScalarModel) -> Self {
        Self { zeta, time, model }
    }
}

/// Linear phase speed of a scalar model at wavenumber `k`.
pub fn scalar_linear_speed(model: ScalarModel, k: f64, p: &PhysicalParams) -> f64 {
    match model {
        ScalarModel::Kdv => p.c0() * (1.0 - (p.depth * k).powi(2) / 6.0),
        ScalarModel::Whitham => p.c0() * Multiplier::whitham_kernel(p.depth).eval(k.abs()),
        ScalarModel::Whitham2 => phase_velocity(k, p),
    }
}

/// Integrating-factor RK4 for the KdV and Whitham equations: the linear part is
/// exponentiated exactly per mode, the nonlinear part is advanced by RK4.
pub struct ScalarSolver {
    ws: Workspace1d,
    p: PhysicalParams,
    model: ScalarModel,
    zeta: Vec<Complex64>,
    time: f64,
    /// `λ(k) = -i k c(k)`; the linear flow is `e^{λ t}`.
    lambda: Vec<Complex64>,
}

impl ScalarSolver {
    pub fn new(state: &ScalarWaveState, p: &PhysicalParams) -> Result<Self> {
        let p = p.validated()?;
        let ws = Workspace1d::new(*state.zeta.grid())?;
        if state.model == ScalarModel::Whitham2 {
            if let Some(i) = first_dry_node(state.zeta.values(), p.depth) {
                return Err(Error::Cavitation { depth: p.depth + state.zeta.values()[i], x: ws.grid().position(i).0 });
            }
        }
        let lambda = ws
            .wavenumbers()
            .iter()
            .zip(ws.ik())
            .map(|(&k, &ik)| -ik * scalar_linear_speed(state.model, k, &p))
            .collect();
        Ok(Self { zeta: ws.forward(state.zeta.values()), time: state.time, model: state.model, lambda, ws, p })
    }

    pub fn state(&self) -> ScalarWaveState {
        ScalarWaveState { zeta: self.ws.field(&self.zeta), time: self.time, model: self.model }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Integrates in place up to `t_end`.
    pub fn advance_to(&mut self, t_end: f64, control: &DtControl) -> Result<Option<HaltEvent>> {
        Ok(time::drive(self, t_end, None, control)?.halt)
    }

    fn nonlinear(&self, zh: &[Complex64]) -> Vec<Complex64> {
        let zeta = self.ws.inverse(zh);
        let ik = self.ws.ik();
        match self.model {
            ScalarModel::Kdv | ScalarModel::Whitham => {
                let coef = 3.0 * self.p.c0() / (4.0 * self.p.depth);
                let sq = self.ws.dealiased_product(&zeta, &zeta);
                sq.iter().zip(ik).map(|(s, d)| -d * coef * s).collect()
            }
            ScalarModel::Whitham2 => {
                let c0 = self.p.c0();
                let speed: Vec<f64> =
                    zeta.iter().map(|z| 3.0 * (self.p.g * (self.p.depth + z).max(0.0)).sqrt() - 3.0 * c0).collect();
                let zx = self.ws.inverse(&self.ws.derivative(zh));
                self.ws.dealiased_product(&speed, &zx).into_iter().map(|v| -v).collect()
            }
        }
    }

    fn advective_speed(&self) -> f64 {
        let zeta = self.ws.inverse(&self.zeta);
        let c0 = self.p.c0();
        match self.model {
            ScalarModel::Kdv | ScalarModel::Whitham => c0 + 1.5 * c0 * max_abs(&zeta) / self.p.depth,
            ScalarModel::Whitham2 => {
                c0 + zeta
                    .iter()
                    .map(|z| (3.0 * (self.p.g * (self.p.depth + z).max(0.0)).sqrt() - 3.0 * c0).abs())
                    .fold(0.0, f64::max)
            }
        }
    }
}

impl Stepper for ScalarSolver {
    type State = ScalarWaveState;

    fn time(&self) -> f64 {
        self.time
    }

    fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    fn snapshot(&self) -> ScalarWaveState {
        self.state()
    }

    fn stable_dt(&self, control: &DtControl) -> f64 {
        control.cfl * self.ws.grid().spacing() / self.advective_speed()
    }

    fn step(&mut self, dt: f64) -> Result<Option<HaltEvent>> {
        let half: Vec<Complex64> = self.lambda.iter().map(|l| (l * (0.5 * dt)).exp()).collect();
        let full: Vec<Complex64> = half.iter().map(|e| e * e).collect();
        let u = &self.zeta;
        let n = u.len();
        let k1 = self.nonlinear(u);
        let a: Vec<Complex64> = (0..n).map(|i| half[i] * (u[i] + k1[i] * (0.5 * dt))).collect();
        let k2 = self.nonlinear(&a);
        let b: Vec<Complex64> = (0..n).map(|i| half[i] * u[i] + k2[i] * (0.5 * dt)).collect();
        let k3 = self.nonlinear(&b);
        let c: Vec<Complex64> = (0..n).map(|i| full[i] * u[i] + half[i] * k3[i] * dt).collect();
        let k4 = self.nonlinear(&c);
        self.zeta = (0..n)
            .map(|i| full[i] * u[i] + (full[i] * k1[i] + 2.0 * half[i] * (k2[i] + k3[i]) + k4[i]) * (dt / 6.0))
            .collect();
        self.time += dt;
        if self.model == ScalarModel::Whitham2 {
            let zeta = self.ws.inverse(&self.zeta);
            if let Some(i) = first_dry_node(&zeta, self.p.depth) {
                return Ok(Some(HaltEvent {
                    kind: HaltKind::Cavitation,
                    time: self.time,
                    location: self.ws.grid().position(i).0,
                    max_gradient: max_abs(&self.ws.inverse(&self.ws.derivative(&self.zeta))),
                    estimated_breaking_time: None,
                }));
            }
        }
        Ok(None)
    }
}

/// Integrates a KdV or Whitham equation with the integrating-factor scheme.
pub fn scalar_evolve(
    state: &ScalarWaveState,
    p: &PhysicalParams,
    t_end: f64,
    snapshot_interval: Option<f64>,
    control: &DtControl,
) -> Result<Trajectory<ScalarWaveState>> {
    let mut solver = ScalarSolver::new(state, p)?;
    time::drive(&mut solver, t_end, snapshot_interval, control)
}

/// Repeats [`scalar_evolve`] with halved step bounds until two successive final
/// states agree to `tol` in L∞; returns the finer run.
pub fn scalar_evolve_refined(
    state: &ScalarWaveState,
    p: &PhysicalParams,
    t_end: f64,
    snapshot_interval: Option<f64>,
    control: &DtControl,
    tol: f64,
) -> Result<Trajectory<ScalarWaveState>> {
    let solver = ScalarSolver::new(state, p)?;
    let base = solver.stable_dt(control).min(control.dt_max);
    let mut control = *control;
    control.dt_max = base;
    let mut coarse = scalar_evolve(state, p, t_end, snapshot_interval, &control)?;
    for _ in 0..16 {
        control = control.halved(control.dt_max);
        let fine = scalar_evolve(state, p, t_end, snapshot_interval, &control)?;
        if fine.halted() || fine.last().zeta.max_abs_diff(&coarse.last().zeta) < tol {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::StepUnderflow { dt: control.dt_max, time: state.time })
}

/// Number of strict local extrema of a periodic field above `floor` in magnitude.
pub fn count_oscillations(f: &SpectralField, floor: f64) -> usize {
    let v = f.values();
    let n = v.len();
    (0..n)
        .filter(|&i| {
            let (l, c, r) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            c.abs() > floor && ((c > l && c > r) || (c < l && c < r))
        })
        .count()
}
