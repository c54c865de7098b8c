//! Exact mode-wise solution operators for the acoustic and linearized (Airy)
//! water-wave equations, dispersion quantities and large-time ray asymptotics.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Gravity and still-water depth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub g: f64,
    pub depth: f64,
}

impl PhysicalParams {
    pub fn new(g: f64, depth: f64) -> Result<Self> {
        Self { g, depth }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidParameter(format!("gravity must be positive, got {}", self.g)));
        }
        if !(self.depth.is_finite() && self.depth > 0.0) {
            return Err(Error::InvalidParameter(format!("depth must be positive, got {}", self.depth)));
        }
        Ok(self)
    }

    /// Long-wave speed `sqrt(gH)`.
    pub fn c0(&self) -> f64 {
        (self.g * self.depth).sqrt()
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self { g: 9.81, depth: 1.0 }
    }
}

/// `|omega(xi)| = sqrt(g |xi| tanh(H |xi|))`.
pub fn omega(xi_mag: f64, p: &PhysicalParams) -> f64 {
    let xi = xi_mag.abs();
    (p.g * xi * (p.depth * xi).tanh()).sqrt()
}

// Below this value of H*xi the closed forms lose digits to cancellation.
const SERIES_SWITCH: f64 = 1e-4;

/// `omega'(xi)` for `xi >= 0`, from differentiating `sqrt(g xi tanh(H xi))`.
pub fn omega_prime(xi: f64, p: &PhysicalParams) -> f64 {
    let s = p.depth * xi;
    if s < SERIES_SWITCH {
        return p.c0() * (1.0 - 0.5 * s * s);
    }
    let th = s.tanh();
    let sech2 = 1.0 - th * th;
    let tp = th + s * sech2;
    p.g * tp / (2.0 * omega(xi, p))
}

/// `omega''(xi)` for `xi >= 0`.
pub fn omega_second(xi: f64, p: &PhysicalParams) -> f64 {
    let s = p.depth * xi;
    if s < SERIES_SWITCH {
        return -p.c0() * p.depth * s;
    }
    let th = s.tanh();
    let sech2 = 1.0 - th * th;
    let tp = th + s * sech2;
    let tpp = 2.0 * p.depth * sech2 * (1.0 - s * th);
    let w = omega(xi, p);
    p.g * tpp / (2.0 * w) - p.g * p.g * tp * tp / (4.0 * w * w * w)
}

/// `c_p = sqrt(gH) (tanh(H|xi|) / (H|xi|))^{1/2}`, equal to `c0` at zero.
pub fn phase_velocity(xi_mag: f64, p: &PhysicalParams) -> f64 {
    let s = p.depth * xi_mag.abs();
    if s == 0.0 {
        return p.c0();
    }
    p.c0() * (s.tanh() / s).sqrt()
}

/// `c_g = sqrt(gH) [ (tanh/s)^{1/2} / 2 + sech^2(s)/2 (s/tanh)^{1/2} ]`, `s = H|xi|`.
pub fn group_velocity(xi_mag: f64, p: &PhysicalParams) -> f64 {
    let s = p.depth * xi_mag.abs();
    if s == 0.0 {
        return p.c0();
    }
    let th = s.tanh();
    let sech2 = 1.0 / s.cosh().powi(2);
    p.c0() * (0.5 * (th / s).sqrt() + 0.5 * sech2 * (s / th).sqrt())
}

/// Which frequency the Airy propagator uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Dispersion {
    /// `omega^2 = g |xi| tanh(H |xi|)`.
    #[default]
    Full,
    /// `tanh(H|xi|)` replaced by `H|xi|`: the acoustic limit.
    LongWave,
}

impl Dispersion {
    fn omega(self, xi: f64, p: &PhysicalParams) -> f64 {
        match self {
            Dispersion::Full => omega(xi, p),
            Dispersion::LongWave => p.c0() * xi.abs(),
        }
    }
}

pub type Matrix2 = [[f64; 2]; 2];

/// `exp(L(xi) t)` acting on `(zeta^, psi^)`.
pub fn airy_propagator(xi_mag: f64, p: &PhysicalParams, t: f64) -> Matrix2 {
    propagator_for(Dispersion::Full.omega(xi_mag, p), p.g, t)
}

fn propagator_for(w: f64, g: f64, t: f64) -> Matrix2 {
    if w == 0.0 {
        return [[1.0, 0.0], [-g * t, 1.0]];
    }
    let (s, c) = (w * t).sin_cos();
    [[c, w / g * s], [-g / w * s, c]]
}

/// Exact acoustic solution `d_t^2 zeta = gH Lap zeta`, mode by mode.
pub fn acoustic_evolve(
    zeta0: &SpectralField,
    zeta_t0: &SpectralField,
    p: &PhysicalParams,
    t: f64,
) -> Result<SpectralField> {
    zeta0.grid().ensure_same(zeta_t0.grid())?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(zeta0.clone());
    }
    let c0 = p.c0();
    let mut z = zeta0.spectrum();
    let zt = zeta_t0.spectrum();
    let xi = zeta0.grid().xi_magnitudes();
    for ((a, b), k) in z.coeffs_mut().iter_mut().zip(zt.coeffs()).zip(xi) {
        *a = if k == 0.0 {
            *a + b * t
        } else {
            let w = c0 * k;
            *a * (w * t).cos() + b * ((w * t).sin() / w)
        };
    }
    Ok(z.to_field())
}

/// Surface elevation and surface potential trace of the linearized system.
#[derive(Clone, Debug, PartialEq)]
pub struct AiryState {
    pub zeta: SpectralField,
    pub psi: SpectralField,
    pub time: f64,
}

impl AiryState {
    pub fn new(zeta: SpectralField, psi: SpectralField, time: f64) -> Result<Self> {
        zeta.grid().ensure_same(psi.grid())?;
        Ok(Self { zeta, psi, time })
    }

    /// Elevation at rest potential.
    pub fn at_rest_potential(zeta: SpectralField) -> Self {
        let psi = SpectralField::zeros(*zeta.grid());
        Self { zeta, psi, time: 0.0 }
    }

    pub fn grid(&self) -> &Grid {
        self.zeta.grid()
    }
}

pub fn airy_evolve(s: &AiryState, p: &PhysicalParams, t: f64) -> Result<AiryState> {
    airy_evolve_with(s, p, t, Dispersion::Full)
}

/// Mode-wise exact evolution under the chosen dispersion.
pub fn airy_evolve_with(s: &AiryState, p: &PhysicalParams, t: f64, dispersion: Dispersion) -> Result<AiryState> {
    s.zeta.grid().ensure_same(s.psi.grid())?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(s.clone());
    }
    let mut z = s.zeta.spectrum();
    let mut q = s.psi.spectrum();
    let xi = s.grid().xi_magnitudes();
    for ((a, b), k) in z.coeffs_mut().iter_mut().zip(q.coeffs_mut()).zip(xi) {
        let m = propagator_for(dispersion.omega(k, p), p.g, t);
        let (za, qa) = (*a, *b);
        *a = za * m[0][0] + qa * m[0][1];
        *b = za * m[1][0] + qa * m[1][1];
    }
    Ok(AiryState { zeta: z.to_field(), psi: q.to_field(), time: s.time + t })
}

/// `1/2 sum (g |zeta^|^2 + omega^2/g |psi^|^2)`, conserved by `airy_evolve`.
pub fn airy_quadratic_invariant(s: &AiryState, p: &PhysicalParams) -> f64 {
    let z = s.zeta.spectrum();
    let q = s.psi.spectrum();
    let xi = s.grid().xi_magnitudes();
    let mut acc = 0.0;
    for ((a, b), k) in z.coeffs().iter().zip(q.coeffs()).zip(xi) {
        let w = omega(k, p);
        acc += p.g * a.norm_sqr() + w * w / p.g * b.norm_sqr();
    }
    0.5 * acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayRegime {
    OutsideCone,
    Interior,
    Edge,
}

/// Large-time behaviour of `|zeta|(t, ct) ~ coefficient * t^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayAsymptotics {
    pub regime: RayRegime,
    /// `-inf` outside the cone (faster than any power).
    pub decay_exponent: f64,
    pub amplitude_coefficient: Option<f64>,
    pub stationary_wavenumber: Option<f64>,
}

/// Stationary-phase classification of the ray `x = ct`.
///
/// `zeta0_hat` and `psi0_hat` are the continuous Fourier transforms of the
/// initial data, `f^(xi) = \int f(x) e^{-i xi x} dx`.
pub fn ray_asymptotics(
    c: f64,
    zeta0_hat: &dyn Fn(f64) -> Complex64,
    psi0_hat: &dyn Fn(f64) -> Complex64,
    p: &PhysicalParams,
) -> Result<RayAsymptotics> {
    let c0 = p.c0();
    let speed = c.abs();
    if c == 0.0 {
        return Err(Error::Unsupported("the ray c = 0 is not classified".into()));
    }
    if !c.is_finite() {
        return Err(Error::InvalidParameter(format!("ray speed must be finite, got {c}")));
    }
    let sign = c.signum();
    let amplitude = |xi: f64, w: f64| zeta0_hat(xi) + Complex64::new(0.0, sign * w / p.g) * psi0_hat(xi);

    if (speed - c0).abs() <= 1e-12 * c0 {
        // omega(xi) psi^(xi) / g -> 0 unless psi^ is singular at the origin; probe just off zero.
        let eps = 1e-9 / p.depth;
        let a0 = zeta0_hat(0.0) + Complex64::new(0.0, sign * omega(eps, p) / p.g) * psi0_hat(eps);
        let coeff = (4.0 * PI).recip()
            * 6f64.powf(1.0 / 3.0)
            * gamma(4.0 / 3.0)
            * a0.norm()
            * (p.depth * p.depth * c0).powf(-1.0 / 3.0);
        return Ok(RayAsymptotics {
            regime: RayRegime::Edge,
            decay_exponent: -1.0 / 3.0,
            amplitude_coefficient: Some(coeff),
            stationary_wavenumber: Some(0.0),
        });
    }
    if speed > c0 {
        return Ok(RayAsymptotics {
            regime: RayRegime::OutsideCone,
            decay_exponent: f64::NEG_INFINITY,
            amplitude_coefficient: None,
            stationary_wavenumber: None,
        });
    }
    let xi_c = stationary_wavenumber(speed, p)?;
    let a = amplitude(xi_c, omega(xi_c, p));
    let coeff = (4.0 * PI).recip() * 2f64.sqrt() * gamma(1.5) * a.norm() * omega_second(xi_c, p).abs().powf(-0.5);
    Ok(RayAsymptotics {
        regime: RayRegime::Interior,
        decay_exponent: -0.5,
        amplitude_coefficient: Some(coeff),
        stationary_wavenumber: Some(xi_c),
    })
}

/// Root `xi > 0` of `omega'(xi) = speed` for `0 < speed < c0`, by bisection.
pub fn stationary_wavenumber(speed: f64, p: &PhysicalParams) -> Result<f64> {
    let c0 = p.c0();
    if !(speed > 0.0 && speed < c0) {
        return Err(Error::RootFinding(format!("speed {speed} outside (0, c0 = {c0})")));
    }
    let mut hi = 1.0 / p.depth;
    let mut doublings = 0;
    while omega_prime(hi, p) >= speed {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::RootFinding(format!("no stationary point bracketed for c = {speed}")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if omega_prime(mid, p) > speed {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Half-width of the window over which the envelope of `|zeta|` is taken at `x = ct`.
pub fn envelope_half_width(regime: RayRegime, c: f64, t: f64, p: &PhysicalParams) -> Result<f64> {
    match regime {
        RayRegime::Interior => Ok(PI / stationary_wavenumber(c.abs(), p)?),
        // Airy-function scale of the front, (c0 H^2 t / 2)^{1/3}, times pi.
        RayRegime::Edge => Ok(PI * (0.5 * p.c0() * p.depth * p.depth * t).cbrt()),
        RayRegime::OutsideCone => Ok(PI * p.depth),
    }
}

/// Local maximum of `|zeta|` over `|x - center| <= half_width` (1D, periodic).
pub fn local_envelope(zeta: &SpectralField, center: f64, half_width: f64) -> f64 {
    let g = zeta.grid();
    let l = g.length();
    g.coordinates()
        .iter()
        .zip(zeta.values())
        .filter(|(x, _)| {
            let d = (*x - center + 0.5 * l).rem_euclid(l) - 0.5 * l;
            d.abs() <= half_width
        })
        .fold(0.0, |m, (_, v)| m.max(v.abs()))
}

/// Least-squares slope of `log y` against `log t`.
pub fn log_log_slope(t: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Measured decay exponent of the envelope of `|zeta|(t, ct)` for an Airy evolution.
pub fn measured_ray_decay(initial: &AiryState, p: &PhysicalParams, c: f64, times: &[f64]) -> Result<f64> {
    let regime = if (c.abs() - p.c0()).abs() <= 1e-12 * p.c0() {
        RayRegime::Edge
    } else if c.abs() < p.c0() {
        RayRegime::Interior
    } else {
        RayRegime::OutsideCone
    };
    let mut env = Vec::with_capacity(times.len());
    for &t in times {
        let s = airy_evolve(initial, p, t)?;
        let w = envelope_half_width(regime, c, t, p)?;
        env.push(local_envelope(&s.zeta, c * t, w));
    }
    Ok(log_log_slope(times, &env))
}

/// Fraction of `sum zeta^2` lying outside `|x| <= radius` (1D or 2D, centered domain).
pub fn energy_fraction_outside(zeta: &SpectralField, radius: f64) -> f64 {
    let g = zeta.grid();
    let mut total = 0.0;
    let mut outside = 0.0;
    for (i, v) in zeta.values().iter().enumerate() {
        let (x, y) = g.position(i);
        let e = v * v;
        total += e;
        if x.hypot(y) > radius {
            outside += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}

/// `(xi, c_p, c_g)` samples on `[0, xi_max]`.
pub fn dispersion_table(xi_max: f64, samples: usize, p: &PhysicalParams) -> Result<Vec<(f64, f64, f64)>> {
    if !(xi_max > 0.0) || samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "need xi_max > 0 and at least two samples, got {xi_max} and {samples}"
        )));
    }
    Ok((0..samples)
        .map(|i| {
            let xi = xi_max * i as f64 / (samples - 1) as f64;
            (xi, phase_velocity(xi, p), group_velocity(xi, p))
        })
        .collect())
}
