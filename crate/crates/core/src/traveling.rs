//! Solitary waves: the closed-form KdV family, Petviashvili iteration for the
//! KdV and Whitham equations, and Newton-Krylov for abcd-Boussinesq systems.

use num_complex::Complex64;
use serde::Serialize;

use crate::dispersive::{classify_abcd, AbcdParams, ScalarModel, Verdict};
use crate::error::{Error, Result};
use crate::krylov::{gmres, GmresOptions};
use crate::linear::PhysicalParams;
use crate::spectral::{derivative, Grid, Multiplier, SpectralField, Spectrum, Workspace1d};

#[derive(Clone, Debug, PartialEq)]
pub struct TravelingWaveSolution {
    pub profile_zeta: SpectralField,
    pub profile_u: Option<SpectralField>,
    pub speed: f64,
    /// L∞ norm of the traveling-wave equations evaluated on the profile.
    pub residual: f64,
    pub iterations: usize,
    /// Final Petviashvili factor `M`, when that solver produced the profile.
    pub stabilizing_factor: Option<f64>,
}

impl TravelingWaveSolution {
    pub fn amplitude(&self) -> f64 {
        self.profile_zeta.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_supercritical(speed: f64, p: &PhysicalParams) -> Result<bool> {
    let c0 = p.c0();
    if !speed.is_finite() || speed < c0 {
        return Err(Error::InvalidParameter(format!("solitary waves need speed > c0 = {c0}, got {speed}")));
    }
    Ok(speed == c0)
}

fn zero_solution(grid: Grid, speed: f64, with_u: bool) -> TravelingWaveSolution {
    TravelingWaveSolution {
        profile_zeta: SpectralField::zeros(grid),
        profile_u: with_u.then(|| SpectralField::zeros(grid)),
        speed,
        residual: 0.0,
        iterations: 0,
        stabilizing_factor: None,
    }
}

/// Decay rate `sqrt(3 (c/c0 - 1) / (2 H²))` of the KdV soliton.
pub fn kdv_decay_rate(speed: f64, p: &PhysicalParams) -> f64 {
    (1.5 * (speed / p.c0() - 1.0)).sqrt() / p.depth
}

/// `ζ_c(x) = 2H(c/c0 - 1) sech²(sqrt(3/(2H²) (c/c0 - 1)) x)`, centered at `x = 0`.
pub fn kdv_soliton(speed: f64, p: &PhysicalParams, grid: &Grid) -> Result<TravelingWaveSolution> {
    let p = p.validated()?;
    if grid.dim() != 1 {
        return Err(Error::InvalidGrid("solitary waves are one-dimensional".into()));
    }
    if check_supercritical(speed, &p)? {
        return Ok(zero_solution(*grid, speed, false));
    }
    let amp = 2.0 * p.depth * (speed / p.c0() - 1.0);
    let kappa = kdv_decay_rate(speed, &p);
    let zeta = SpectralField::from_fn(*grid, |x, _| amp / (kappa * x).cosh().powi(2));
    let residual = traveling_residual(ScalarModel::Kdv, speed, &p, &zeta)?;
    Ok(TravelingWaveSolution {
        profile_zeta: zeta,
        profile_u: None,
        speed,
        residual,
        iterations: 0,
        stabilizing_factor: None,
    })
}

/// Symbol `L(ξ)` of the linear part of the once-integrated traveling-wave equation
/// `L(D) ζ = (3 c0 / (4H)) ζ²`.
pub fn traveling_symbol(model: ScalarModel, speed: f64, xi: f64, p: &PhysicalParams) -> Result<f64> {
    let c0 = p.c0();
    match model {
        ScalarModel::Kdv => Ok(speed - c0 * (1.0 - (p.depth * xi).powi(2) / 6.0)),
        ScalarModel::Whitham => Ok(speed - c0 * Multiplier::whitham_kernel(p.depth).eval(xi.abs())),
        ScalarModel::Whitham2 => {
            Err(Error::Unsupported("traveling waves are computed for kdv and whitham only".into()))
        }
    }
}

/// `max |L(D)ζ - (3 c0/(4H)) ζ²|`.
pub fn traveling_residual(model: ScalarModel, speed: f64, p: &PhysicalParams, zeta: &SpectralField) -> Result<f64> {
    let mut spec = zeta.spectrum();
    let mut err = None;
    spec.scale_by(|xi| match traveling_symbol(model, speed, xi, p) {
        Ok(l) => l,
        Err(e) => {
            err.get_or_insert(e);
            0.0
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let lz = spec.to_field();
    let coef = 3.0 * p.c0() / (4.0 * p.depth);
    Ok(lz.values().iter().zip(zeta.values()).map(|(l, z)| (l - coef * z * z).abs()).fold(0.0, f64::max))
}

/// Average of `f(x)` and `f(-x)`; on the grid `x_j = -L/2 + j dx` the reflection is `j ↦ N - j`.
fn symmetrize(values: &mut [f64]) {
    let n = values.len();
    let orig = values.to_vec();
    for j in 0..n {
        values[j] = 0.5 * (orig[j] + orig[(n - j) % n]);
    }
}

/// Translates a 1D profile so its maximum sits at `x = 0`.
fn recenter(zeta: &SpectralField) -> SpectralField {
    let v = zeta.values();
    let n = v.len();
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    let (l, c, r) = (v[(best + n - 1) % n], v[best], v[(best + 1) % n]);
    let curv = l - 2.0 * c + r;
    let offset = if curv < 0.0 { 0.5 * (l - r) / curv } else { 0.0 };
    let x_max = zeta.grid().position(best).0 + offset * zeta.grid().spacing();
    if x_max == 0.0 {
        return zeta.clone();
    }
    zeta.spectrum().translated(-x_max).to_field()
}

const TRACE_LEN: usize = 20;

/// Petviashvili iteration `ζ ← M^2 L⁻¹ N(ζ)` with `M = <Lζ, ζ> / <N(ζ), ζ>`.
/// The guess defaults to the KdV soliton at the same speed.
pub fn petviashvili_solve(
    model: ScalarModel,
    speed: f64,
    p: &PhysicalParams,
    grid: &Grid,
    tol: f64,
    max_iter: usize,
    guess: Option<&SpectralField>,
) -> Result<TravelingWaveSolution> {
    let p = p.validated()?;
    traveling_symbol(model, speed, 0.0, &p)?;
    if check_supercritical(speed, &p)? {
        return Ok(zero_solution(*grid, speed, false));
    }
    let ws = Workspace1d::new(*grid)?;
    let symbol =
        ws.wavenumbers().iter().map(|&k| traveling_symbol(model, speed, k, &p)).collect::<Result<Vec<f64>>>()?;
    let scale = symbol.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    if let Some((i, _)) = symbol.iter().enumerate().find(|(_, l)| l.abs() <= 1e-14 * scale) {
        return Err(Error::Resonance { xi: ws.wavenumbers()[i] });
    }

    let start = match guess {
        Some(g) => {
            grid.ensure_same(g.grid())?;
            g.clone()
        }
        None => kdv_soliton(speed, &p, grid)?.profile_zeta,
    };
    let mut zeta = recenter(&start).into_values();
    symmetrize(&mut zeta);

    let coef = 3.0 * p.c0() / (4.0 * p.depth);
    let mut trace = Vec::new();
    for iteration in 1..=max_iter {
        let zh = ws.forward(&zeta);
        let sq: Vec<f64> = zeta.iter().map(|z| coef * z * z).collect();
        let nh = ws.forward(&sq);
        let num: f64 = zh.iter().zip(&symbol).map(|(z, l)| l * z.norm_sqr()).sum();
        let den: f64 = nh.iter().zip(&zh).map(|(a, b)| (a * b.conj()).re).sum();
        let m = num / den;
        trace.push(m);
        if trace.len() > TRACE_LEN {
            trace.remove(0);
        }
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Divergence {
                iterations: iteration,
                reason: format!("stabilizing factor became {m}"),
                trace,
            });
        }
        let next: Vec<Complex64> = nh.iter().zip(&symbol).map(|(n, l)| n * (m * m / l)).collect();
        let mut new = ws.inverse(&next);
        symmetrize(&mut new);
        let diff = new.iter().zip(&zeta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        zeta = new;
        if !diff.is_finite() {
            return Err(Error::Divergence { iterations: iteration, reason: "non-finite iterate".into(), trace });
        }
        if diff < tol {
            let profile = SpectralField::new(*grid, zeta)?;
            let residual = traveling_residual(model, speed, &p, &profile)?;
            return Ok(TravelingWaveSolution {
                profile_zeta: profile,
                profile_u: None,
                speed,
                residual,
                iterations: iteration,
                stabilizing_factor: Some(m),
            });
        }
    }
    Err(Error::Divergence {
        iterations: max_iter,
        reason: format!("no convergence to {tol} in {max_iter} iterations"),
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuationStep {
    pub speed: f64,
    pub amplitude: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuationFailure {
    pub speed: f64,
    pub reason: String,
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuationReport {
    pub steps: Vec<ContinuationStep>,
    pub failure: Option<ContinuationFailure>,
}

impl ContinuationReport {
    pub fn reached(&self, speed: f64) -> bool {
        self.failure.is_none() && self.steps.last().is_some_and(|s| (s.speed - speed).abs() <= 1e-12 * speed)
    }
}

/// Petviashvili solves along `steps` geometrically spaced speeds from `from` to `to`,
/// each seeded with the previous profile. Stops at the first failure.
#[allow(clippy::too_many_arguments)]
pub fn petviashvili_continuation(
    model: ScalarModel,
    from: f64,
    to: f64,
    steps: usize,
    p: &PhysicalParams,
    grid: &Grid,
    tol: f64,
    max_iter: usize,
) -> Result<ContinuationReport> {
    if steps == 0 || !(from > 0.0 && to > 0.0) {
        return Err(Error::InvalidParameter("continuation needs positive speeds and at least one step".into()));
    }
    let ratio = to / from;
    let mut report = ContinuationReport { steps: Vec::new(), failure: None };
    let mut guess: Option<SpectralField> = None;
    for i in 0..=steps {
        let speed = if i == steps { to } else { from * ratio.powf(i as f64 / steps as f64) };
        match petviashvili_solve(model, speed, p, grid, tol, max_iter, guess.as_ref()) {
            Ok(sol) => {
                report.steps.push(ContinuationStep {
                    speed,
                    amplitude: sol.amplitude(),
                    iterations: sol.iterations,
                    residual: sol.residual,
                });
                guess = Some(sol.profile_zeta);
            }
            Err(Error::Divergence { reason, trace, .. }) => {
                report.failure = Some(ContinuationFailure { speed, reason, trace });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// Residuals of the once-integrated steady abcd system in the frame moving at `speed`:
/// `-c(ζ - bH²ζ'') + (H + ζ)u + aH³u''` and `-c(u - dH²u'') + g(ζ + cH²ζ'') + u²/2`.
pub fn boussinesq_steady_residual(
    params: &AbcdParams,
    speed: f64,
    p: &PhysicalParams,
    zeta: &SpectralField,
    u: &SpectralField,
) -> Result<(SpectralField, SpectralField)> {
    zeta.grid().ensure_same(u.grid())?;
    let h = p.depth;
    let zxx = derivative(zeta, 0, 2)?;
    let uxx = derivative(u, 0, 2)?;
    let grid = *zeta.grid();
    let n = grid.len();
    let (z, v, z2, v2) = (zeta.values(), u.values(), zxx.values(), uxx.values());
    let r1 = (0..n)
        .map(|i| -speed * (z[i] - params.b * h * h * z2[i]) + (h + z[i]) * v[i] + params.a * h.powi(3) * v2[i])
        .collect();
    let r2 = (0..n)
        .map(|i| {
            -speed * (v[i] - params.d * h * h * v2[i]) + p.g * (z[i] + params.c * h * h * z2[i]) + 0.5 * v[i] * v[i]
        })
        .collect();
    Ok((SpectralField::new(grid, r1)?, SpectralField::new(grid, r2)?))
}

struct SteadyBoussinesq<'a> {
    ws: &'a Workspace1d,
    params: AbcdParams,
    p: PhysicalParams,
    speed: f64,
    /// `-(k)²` for every mode.
    second: Vec<f64>,
}

impl SteadyBoussinesq<'_> {
    fn dxx(&self, v: &[f64]) -> Vec<f64> {
        let mut c = self.ws.forward(v);
        for (ci, s) in c.iter_mut().zip(&self.second) {
            *ci *= s;
        }
        self.ws.inverse(&c)
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len() / 2;
        let (z, v) = x.split_at(n);
        let (z2, v2) = (self.dxx(z), self.dxx(v));
        let (h, c, g, pr) = (self.p.depth, self.speed, self.p.g, &self.params);
        let mut out = Vec::with_capacity(2 * n);
        out.extend((0..n).map(|i| -c * (z[i] - pr.b * h * h * z2[i]) + (h + z[i]) * v[i] + pr.a * h.powi(3) * v2[i]));
        out.extend(
            (0..n).map(|i| -c * (v[i] - pr.d * h * h * v2[i]) + g * (z[i] + pr.c * h * h * z2[i]) + 0.5 * v[i] * v[i]),
        );
        out
    }

    fn jacobian_apply(&self, x: &[f64], dx: &[f64]) -> Vec<f64> {
        let n = x.len() / 2;
        let (z, v) = x.split_at(n);
        let (dz, dv) = dx.split_at(n);
        let (dz2, dv2) = (self.dxx(dz), self.dxx(dv));
        let (h, c, g, pr) = (self.p.depth, self.speed, self.p.g, &self.params);
        let mut out = Vec::with_capacity(2 * n);
        out.extend((0..n).map(|i| {
            -c * (dz[i] - pr.b * h * h * dz2[i]) + v[i] * dz[i] + (h + z[i]) * dv[i] + pr.a * h.powi(3) * dv2[i]
        }));
        out.extend(
            (0..n).map(|i| -c * (dv[i] - pr.d * h * h * dv2[i]) + g * (dz[i] + pr.c * h * h * dz2[i]) + v[i] * dv[i]),
        );
        out
    }

    /// Inverse of the Jacobian at rest, mode by mode.
    fn precondition(&self, r: &[f64]) -> Vec<f64> {
        let n = r.len() / 2;
        let r1 = self.ws.forward(&r[..n]);
        let r2 = self.ws.forward(&r[n..]);
        let (h, c, g, pr) = (self.p.depth, self.speed, self.p.g, &self.params);
        let mut x1 = Vec::with_capacity(n);
        let mut x2 = Vec::with_capacity(n);
        for i in 0..n {
            let s = -self.second[i] * h * h;
            let a11 = -c * (1.0 + pr.b * s);
            let a12 = h * (1.0 - pr.a * s);
            let a21 = g * (1.0 - pr.c * s);
            let a22 = -c * (1.0 + pr.d * s);
            let det = a11 * a22 - a12 * a21;
            x1.push((r1[i] * a22 - r2[i] * a12) / det);
            x2.push((r2[i] * a11 - r1[i] * a21) / det);
        }
        let mut out = self.ws.inverse(&x1);
        out.extend(self.ws.inverse(&x2));
        out
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solitary wave of the abcd system by Newton-Krylov on the once-integrated steady
/// equations, started from the KdV soliton with `u = c ζ / (H + ζ)`.
pub fn boussinesq_solitary_solve(
    params: &AbcdParams,
    speed: f64,
    p: &PhysicalParams,
    grid: &Grid,
    tol: f64,
) -> Result<TravelingWaveSolution> {
    let p = p.validated()?;
    let params = params.validated()?;
    if grid.dim() != 1 {
        return Err(Error::InvalidGrid("solitary waves are one-dimensional".into()));
    }
    if classify_abcd(&params, &p).verdict == Verdict::IllPosed {
        return Err(Error::IllPosed("solitary waves are computed for well-posed parameters only".into()));
    }
    if check_supercritical(speed, &p)? {
        return Ok(zero_solution(*grid, speed, true));
    }
    let ws = Workspace1d::new(*grid)?;
    let second = ws.wavenumbers().iter().map(|k| -k * k).collect();
    let sys = SteadyBoussinesq { ws: &ws, params, p, speed, second };

    let guess = kdv_soliton(speed, &p, grid)?.profile_zeta;
    let guess_amp = guess.max_abs();
    let n = grid.len();
    let mut x: Vec<f64> = guess.values().to_vec();
    x.extend(guess.values().iter().map(|z| speed * z / (p.depth + z)));

    const MAX_NEWTON: usize = 40;
    let opts = GmresOptions { restart: 80, max_iter: 800, rel_tol: 1e-13 };
    let mut trace = Vec::new();
    let mut f = sys.residual(&x);
    for iteration in 1..=MAX_NEWTON {
        let fnorm = sup(&f);
        trace.push(fnorm);
        if fnorm < tol {
            break;
        }
        if iteration == MAX_NEWTON {
            return Err(Error::Divergence {
                iterations: MAX_NEWTON,
                reason: format!("residual {fnorm} above {tol}"),
                trace,
            });
        }
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let xs = x.clone();
        let step = gmres(|d| sys.jacobian_apply(&xs, d), |r| sys.precondition(r), &rhs, &opts)?;
        if !step.x.iter().all(|v| v.is_finite()) {
            return Err(Error::SingularJacobian("non-finite Newton step".into()));
        }
        // Backtracking on the sup norm of the residual.
        let mut t = 1.0;
        loop {
            let mut trial: Vec<f64> = x.iter().zip(&step.x).map(|(a, b)| a + t * b).collect();
            symmetrize(&mut trial[..n]);
            symmetrize(&mut trial[n..]);
            let ft = sys.residual(&trial);
            if sup(&ft) < (1.0 - 1e-4 * t) * fnorm || t < 1e-3 {
                x = trial;
                f = ft;
                break;
            }
            t *= 0.5;
        }
        let amp = sup(&x[..n]);
        if amp < 1e-3 * guess_amp {
            return Err(Error::Divergence {
                iterations: iteration,
                reason: "collapsed onto the trivial solution".into(),
                trace,
            });
        }
    }
    let zeta = SpectralField::new(*grid, x[..n].to_vec())?;
    let u = SpectralField::new(*grid, x[n..].to_vec())?;
    if zeta.values().iter().any(|z| !(p.depth + z > 0.0)) {
        return Err(Error::Divergence { iterations: trace.len(), reason: "profile cavitates".into(), trace });
    }
    let (r1, r2) = boussinesq_steady_residual(&params, speed, &p, &zeta, &u)?;
    let iterations = trace.len() - 1;
    Ok(TravelingWaveSolution {
        profile_zeta: zeta,
        profile_u: Some(u),
        speed,
        residual: r1.max_abs().max(r2.max_abs()),
        iterations,
        stabilizing_factor: None,
    })
}

/// Shape error `max |ζ(t, x) - ζ(0, x - c t)|` of an evolved traveling wave.
pub fn translation_error(initial: &SpectralField, evolved: &SpectralField, speed: f64, t: f64) -> Result<f64> {
    initial.grid().ensure_same(evolved.grid())?;
    let moved = initial.spectrum().translated(speed * t).to_field();
    Ok(moved.max_abs_diff(evolved))
}

/// Profile values at arbitrary points, by trigonometric interpolation.
pub fn sample_profile(profile: &SpectralField, xs: &[f64]) -> Vec<f64> {
    let spec: Spectrum = profile.spectrum();
    xs.iter().map(|&x| spec.evaluate_at(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersive::{scalar_evolve, ScalarWaveState};
    use crate::time::DtControl;

    fn earth() -> PhysicalParams {
        PhysicalParams::default()
    }

    fn grid() -> Grid {
        Grid::new_1d(200.0, 1024).unwrap()
    }

    #[test]
    fn kdv_soliton_closed_form() {
        let p = earth();
        let s = kdv_soliton(1.05 * p.c0(), &p, &grid()).unwrap();
        assert!((s.amplitude() - 0.1).abs() < 1e-15);
        assert!((kdv_decay_rate(1.05 * p.c0(), &p) - 0.075f64.sqrt()).abs() < 1e-15);
        assert!((0.075f64.sqrt() - 0.273_861_278_752_583).abs() < 1e-15);
        assert!(s.residual < 1e-12, "{}", s.residual);
        let z = kdv_soliton(p.c0(), &p, &grid()).unwrap();
        assert_eq!(z.profile_zeta.max_abs(), 0.0);
        assert!(kdv_soliton(0.9 * p.c0(), &p, &grid()).is_err());
    }

    #[test]
    fn petviashvili_recovers_kdv_soliton() {
        let p = earth();
        let c = 1.05 * p.c0();
        let sol = petviashvili_solve(ScalarModel::Kdv, c, &p, &grid(), 1e-12, 2000, None).unwrap();
        let exact = kdv_soliton(c, &p, &grid()).unwrap();
        assert!(sol.profile_zeta.max_abs_diff(&exact.profile_zeta) < 1e-8);
        assert!((sol.stabilizing_factor.unwrap() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn petviashvili_from_translated_and_rescaled_guess() {
        let p = earth();
        let c = 1.05 * p.c0();
        let g = grid();
        let shifted = kdv_soliton(c, &p, &g).unwrap().profile_zeta.spectrum().translated(7.3).to_field().scaled(0.6);
        let sol = petviashvili_solve(ScalarModel::Kdv, c, &p, &g, 1e-12, 2000, Some(&shifted)).unwrap();
        let exact = kdv_soliton(c, &p, &g).unwrap();
        assert!(sol.profile_zeta.max_abs_diff(&exact.profile_zeta) < 1e-8);
    }

    #[test]
    fn whitham_solitary_wave_is_smaller_than_kdv() {
        let p = earth();
        let c = 1.05 * p.c0();
        let sol = petviashvili_solve(ScalarModel::Whitham, c, &p, &grid(), 1e-12, 5000, None).unwrap();
        assert!(sol.residual < 1e-10, "{}", sol.residual);
        let amp = sol.amplitude();
        assert!(amp > 0.0 && (amp - 0.1).abs() > 1e-4, "{amp}");
    }

    #[test]
    fn amplitude_grows_with_speed() {
        let p = earth();
        let mut last = 0.0;
        for r in [1.02, 1.04, 1.06, 1.08] {
            let sol = petviashvili_solve(ScalarModel::Whitham, r * p.c0(), &p, &grid(), 1e-11, 5000, None).unwrap();
            assert!(sol.amplitude() > last);
            last = sol.amplitude();
        }
    }

    #[test]
    fn petviashvili_reports_divergence() {
        let p = earth();
        match petviashvili_solve(ScalarModel::Whitham, 1.05 * p.c0(), &p, &grid(), 1e-14, 3, None) {
            Err(Error::Divergence { iterations, trace, .. }) => {
                assert_eq!(iterations, 3);
                assert_eq!(trace.len(), 3);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            petviashvili_solve(ScalarModel::Whitham2, 1.05 * p.c0(), &p, &grid(), 1e-10, 3, None),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn whitham_solitary_wave_travels() {
        let p = earth();
        let c = 1.05 * p.c0();
        let sol = petviashvili_solve(ScalarModel::Whitham, c, &p, &grid(), 1e-12, 5000, None).unwrap();
        let t = 5.0 / p.c0();
        let s = ScalarWaveState::new(sol.profile_zeta.clone(), 0.0, ScalarModel::Whitham);
        let traj = scalar_evolve(&s, &p, t, None, &DtControl::with_dt_max(0.005)).unwrap();
        let err = translation_error(&sol.profile_zeta, &traj.last().zeta, c, t).unwrap();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn symmetrize_reflects_about_origin() {
        let g = Grid::new_1d(10.0, 16).unwrap();
        let f = SpectralField::from_fn(g, |x, _| x + x * x);
        let mut v = f.values().to_vec();
        symmetrize(&mut v);
        let even = SpectralField::from_fn(g, |x, _| if x == -5.0 { -5.0 + 25.0 } else { x * x });
        assert!(v.iter().zip(even.values()).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn boussinesq_solitary_waves() {
        let p = earth();
        let params = AbcdParams::new(-1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0).unwrap();
        let g = Grid::new_1d(400.0, 1024).unwrap();
        let small = boussinesq_solitary_solve(&params, 1.01 * p.c0(), &p, &g, 1e-12).unwrap();
        let large = boussinesq_solitary_solve(&params, 1.05 * p.c0(), &p, &g, 1e-12).unwrap();
        assert!(small.residual < 1e-10 && large.residual < 1e-10);
        assert!(large.amplitude() > small.amplitude() && small.amplitude() > 0.0);
        let rest = boussinesq_solitary_solve(&params, p.c0(), &p, &g, 1e-12).unwrap();
        assert_eq!(rest.profile_zeta.max_abs(), 0.0);
        let bad = AbcdParams::new(1.0 / 3.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(boussinesq_solitary_solve(&bad, 1.05 * p.c0(), &p, &g, 1e-12), Err(Error::IllPosed(_))));
    }
}
