//! Periodic grids, discrete Fourier transforms and Fourier multipliers.
//!
//! Nodes sit at `x_j = -L/2 + j*dx`, so the origin is node `N/2` and profiles
//! centered at zero are sampled symmetrically. Coefficients are stored in the
//! usual FFT order; mode index `i` carries the signed wavenumber index
//! `i` for `i < N/2` and `i - N` otherwise, giving `{-N/2, ..., N/2-1}`.
//!
//! The forward transform is unnormalized and the inverse divides by the node
//! count. Multiplying a coefficient by `dx^d` gives the continuous transform
//! `f^(xi) = \int f(x) e^{-i xi x} dx` up to the phase of the origin shift.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Planned 1D transform pair of a fixed length. Cheap to clone.
#[derive(Clone)]
pub struct Fft1d {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl Fft1d {
    pub fn new(n: usize) -> Self {
        Self { forward: plan(n, false), inverse: plan(n, true), scale: 1.0 / n as f64 }
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Normalized inverse.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        for c in buf.iter_mut() {
            *c *= self.scale;
        }
    }

    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut buf);
        buf
    }

    pub fn inverse_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.inverse(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}

impl fmt::Debug for Fft1d {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fft1d").field("len", &self.forward.len()).finish()
    }
}

/// Uniform periodic grid, square in 2D.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    dim: usize,
    length: f64,
    nodes: usize,
}

impl Grid {
    pub fn new(dim: usize, length: f64, nodes: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        if nodes < 4 || !nodes.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("nodes per axis must be even and >= 4, got {nodes}")));
        }
        Ok(Self { dim, length, nodes })
    }

    pub fn new_1d(length: f64, nodes: usize) -> Result<Self> {
        Self::new(1, length, nodes)
    }

    pub fn new_2d(length: f64, nodes: usize) -> Result<Self> {
        Self::new(2, length, nodes)
    }

    /// Re-checks the invariants, for grids obtained through deserialization.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.dim, self.length, self.nodes)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.nodes as f64
    }

    /// Total number of nodes, `N^dim`.
    pub fn len(&self) -> usize {
        self.nodes.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `dx^dim`, the quadrature weight of each node.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Node coordinates along one axis.
    pub fn coordinates(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.nodes).map(|j| -0.5 * self.length + j as f64 * dx).collect()
    }

    /// Physical position of a flat node index; `y` is zero in 1D.
    pub fn position(&self, flat: usize) -> (f64, f64) {
        let dx = self.spacing();
        let x0 = -0.5 * self.length;
        match self.dim {
            1 => (x0 + flat as f64 * dx, 0.0),
            _ => {
                let (ix, iy) = (flat % self.nodes, flat / self.nodes);
                (x0 + ix as f64 * dx, x0 + iy as f64 * dx)
            }
        }
    }

    /// Signed wavenumber index of a per-axis storage index.
    pub fn mode_index(&self, i: usize) -> i64 {
        let n = self.nodes as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Wavenumber `2 pi k / L` of a per-axis storage index.
    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * PI * self.mode_index(i) as f64 / self.length
    }

    /// Per-axis wavenumbers in storage order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.wavenumber(i)).collect()
    }

    /// Per-axis storage indices `(ix, iy)` of a flat mode index.
    pub fn axis_indices(&self, flat: usize) -> [usize; 2] {
        match self.dim {
            1 => [flat, 0],
            _ => [flat % self.nodes, flat / self.nodes],
        }
    }

    /// `|xi|` for every mode, in flat storage order.
    pub fn xi_magnitudes(&self) -> Vec<f64> {
        let k = self.wavenumbers();
        match self.dim {
            1 => k.iter().map(|v| v.abs()).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.len());
                for ky in &k {
                    for kx in &k {
                        out.push(kx.hypot(*ky));
                    }
                }
                out
            }
        }
    }

    /// Largest retained `|k|` under the 2/3 rule.
    pub fn dealias_cutoff(&self) -> usize {
        self.nodes / 3
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.nodes;
        let fft = plan(n, inverse);
        match self.dim {
            1 => fft.process(buf),
            _ => {
                for row in buf.chunks_exact_mut(n) {
                    fft.process(row);
                }
                let mut col = vec![Complex64::default(); n];
                for ix in 0..n {
                    for iy in 0..n {
                        col[iy] = buf[iy * n + ix];
                    }
                    fft.process(&mut col);
                    for iy in 0..n {
                        buf[iy * n + ix] = col[iy];
                    }
                }
            }
        }
        if inverse {
            let scale = 1.0 / self.len() as f64;
            for c in buf.iter_mut() {
                *c *= scale;
            }
        }
    }
}

/// Real field sampled on the grid nodes (row-major in 2D, `x` fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    values: Vec<f64>,
}

impl SpectralField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    /// Samples `f(x, y)` at every node (`y = 0` in 1D).
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let (x, y) = grid.position(i);
                f(x, y)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut coeffs: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.grid.transform(&mut coeffs, false);
        Spectrum { grid: self.grid, coeffs }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sum f dx^d`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// `sum f^2 dx^d`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `||self - other||_2 / ||other||_2`; the plain difference norm if `other` vanishes.
    pub fn relative_l2_diff(&self, other: &SpectralField) -> f64 {
        let diff: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).powi(2)).sum();
        let base: f64 = other.values.iter().map(|b| b * b).sum();
        if base == 0.0 {
            (diff * self.grid.cell_volume()).sqrt()
        } else {
            (diff / base).sqrt()
        }
    }

    pub fn scaled(&self, alpha: f64) -> SpectralField {
        SpectralField { grid: self.grid, values: self.values.iter().map(|v| alpha * v).collect() }
    }

    pub fn linear_combination(&self, alpha: f64, other: &SpectralField, beta: f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(SpectralField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect(),
        })
    }
}

/// Fourier coefficients of a real field.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!("expected {} coefficients, got {}", grid.len(), coeffs.len())));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Back to physical space, discarding the round-off imaginary part.
    pub fn to_field(&self) -> SpectralField {
        let mut buf = self.coeffs.clone();
        self.grid.transform(&mut buf, true);
        SpectralField { grid: self.grid, values: buf.into_iter().map(|c| c.re).collect() }
    }

    /// `(dx^d / N^d) sum |F_k|^2`, equal to `sum f^2 dx^d` by Parseval.
    pub fn energy(&self) -> f64 {
        let g = &self.grid;
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * g.cell_volume() / g.len() as f64
    }

    /// Largest violation of `F(-k) = conj(F(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.nodes;
        let neg = |i: usize| (n - i) % n;
        let mut worst: f64 = 0.0;
        for flat in 0..self.coeffs.len() {
            let [ix, iy] = self.grid.axis_indices(flat);
            let mirror = match self.grid.dim {
                1 => neg(ix),
                _ => neg(iy) * n + neg(ix),
            };
            worst = worst.max((self.coeffs[flat] - self.coeffs[mirror].conj()).norm());
        }
        worst
    }

    /// Multiplies every coefficient by `symbol(|xi|)`.
    pub fn scale_by(&mut self, mut symbol: impl FnMut(f64) -> f64) {
        for (c, xi) in self.coeffs.iter_mut().zip(self.grid.xi_magnitudes()) {
            *c *= symbol(xi);
        }
    }

    pub fn dealias_in_place(&mut self) {
        let cutoff = self.grid.dealias_cutoff() as i64;
        let g = self.grid;
        for (flat, c) in self.coeffs.iter_mut().enumerate() {
            let [ix, iy] = g.axis_indices(flat);
            let beyond = g.mode_index(ix).abs() > cutoff || (g.dim == 2 && g.mode_index(iy).abs() > cutoff);
            if beyond {
                *c = Complex64::default();
            }
        }
    }

    /// Trigonometric interpolant at an arbitrary 1D position.
    pub fn evaluate_at(&self, x: f64) -> f64 {
        self.interpolate(x, 0)
    }

    /// Derivative of the trigonometric interpolant at an arbitrary 1D position.
    pub fn derivative_at(&self, x: f64) -> f64 {
        self.interpolate(x, 1)
    }

    fn interpolate(&self, x: f64, order: u32) -> f64 {
        debug_assert_eq!(self.grid.dim, 1);
        let n = self.grid.nodes;
        let s = x + 0.5 * self.grid.length;
        let base = 2.0 * PI / self.grid.length;
        let mut acc = if order == 0 { self.coeffs[0].re } else { 0.0 };
        for k in 1..n / 2 {
            let xi = base * k as f64;
            let phase = Complex64::from_polar(1.0, xi * s);
            let d = Complex64::new(0.0, xi).powu(order);
            acc += 2.0 * (self.coeffs[k] * phase * d).re;
        }
        // Nyquist term enters as a cosine; its odd derivatives vanish at nodes and are dropped.
        if order.is_multiple_of(2) {
            let xi = base * (n / 2) as f64;
            let sign = if order.is_multiple_of(4) { 1.0 } else { -1.0 };
            acc += sign * self.coeffs[n / 2].re * xi.powi(order as i32) * (xi * s).cos();
        }
        acc / n as f64
    }

    /// Spectral translation: returns the coefficients of `f(x - shift)` (1D).
    pub fn translated(&self, shift: f64) -> Spectrum {
        let n = self.grid.nodes;
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let xi = self.grid.wavenumber(i);
            if i == n / 2 {
                *c *= (xi * shift).cos();
            } else {
                *c *= Complex64::from_polar(1.0, -xi * shift);
            }
        }
        out
    }
}

type SymbolFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Real even Fourier multiplier `m(|D|)` with an explicit value at `|xi| = 0`.
#[derive(Clone)]
pub struct Multiplier {
    label: String,
    at_zero: f64,
    symbol: Arc<SymbolFn>,
}

impl Multiplier {
    pub fn new(label: impl Into<String>, at_zero: f64, symbol: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { label: label.into(), at_zero, symbol: Arc::new(symbol) }
    }

    pub fn identity() -> Self {
        Self::new("1", 1.0, |_| 1.0)
    }

    /// `|xi|^power`.
    pub fn power(power: i32) -> Self {
        let at_zero = if power == 0 { 1.0 } else { 0.0 };
        Self::new(format!("|xi|^{power}"), at_zero, move |xi| xi.powi(power))
    }

    /// `G0 = |D| tanh(H|D|)`.
    pub fn g0(depth: f64) -> Self {
        Self::new("|D|tanh(H|D|)", 0.0, move |xi| xi * (depth * xi).tanh())
    }

    /// Whitham kernel `K_W = sqrt(tanh(H|D|) / (H|D|))`, `K_W(0) = 1`.
    pub fn whitham_kernel(depth: f64) -> Self {
        Self::new("sqrt(tanh(H|D|)/(H|D|))", 1.0, move |xi| {
            let s = depth * xi;
            ((s).tanh() / s).sqrt()
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, xi_mag: f64) -> f64 {
        if xi_mag == 0.0 {
            self.at_zero
        } else {
            (self.symbol)(xi_mag)
        }
    }

    /// Symbol values on every mode of `grid`, or the first non-finite one.
    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        grid.xi_magnitudes()
            .into_iter()
            .map(|xi| {
                let m = self.eval(xi);
                if m.is_finite() {
                    Ok(m)
                } else {
                    Err(Error::NonFiniteSymbol { label: self.label.clone(), xi })
                }
            })
            .collect()
    }
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multiplier").field("label", &self.label).field("at_zero", &self.at_zero).finish()
    }
}

pub fn apply_multiplier(f: &SpectralField, m: &Multiplier) -> Result<SpectralField> {
    let symbol = m.sample(f.grid())?;
    let mut spec = f.spectrum();
    for (c, s) in spec.coeffs.iter_mut().zip(symbol) {
        *c *= s;
    }
    Ok(spec.to_field())
}

/// 2/3-rule truncation.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let mut spec = f.spectrum();
    spec.dealias_in_place();
    spec.to_field()
}

/// Spectral derivative `(i xi)^order` along `axis`.
pub fn derivative(f: &SpectralField, axis: usize, order: u32) -> Result<SpectralField> {
    let grid = *f.grid();
    if axis >= grid.dim() {
        return Err(Error::AxisOutOfRange { axis, dim: grid.dim() });
    }
    if order == 0 || order > 4 {
        return Err(Error::DerivativeOrder(order));
    }
    let mut spec = f.spectrum();
    derivative_in_place(&mut spec, axis, order);
    Ok(spec.to_field())
}

pub(crate) fn derivative_in_place(spec: &mut Spectrum, axis: usize, order: u32) {
    let grid = spec.grid;
    let nyquist = grid.nodes / 2;
    for (flat, c) in spec.coeffs.iter_mut().enumerate() {
        let i = grid.axis_indices(flat)[axis];
        if order % 2 == 1 && i == nyquist {
            *c = Complex64::default();
        } else {
            *c *= Complex64::new(0.0, grid.wavenumber(i)).powu(order);
        }
    }
}

/// Precomputed 1D transform, derivative symbol and 2/3 mask for the time-steppers.
#[derive(Clone, Debug)]
pub struct Workspace1d {
    grid: Grid,
    fft: Fft1d,
    wavenumbers: Vec<f64>,
    /// `i xi` with the Nyquist entry zeroed.
    ik: Vec<Complex64>,
    keep: Vec<bool>,
}

impl Workspace1d {
    pub fn new(grid: Grid) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::InvalidGrid("a one-dimensional grid is required".into()));
        }
        let n = grid.nodes();
        let wavenumbers = grid.wavenumbers();
        let ik = wavenumbers
            .iter()
            .enumerate()
            .map(|(i, &k)| if i == n / 2 { Complex64::default() } else { Complex64::new(0.0, k) })
            .collect();
        let cutoff = grid.dealias_cutoff() as i64;
        let keep = (0..n).map(|i| grid.mode_index(i).abs() <= cutoff).collect();
        Ok(Self { grid, fft: Fft1d::new(n), wavenumbers, ik, keep })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn ik(&self) -> &[Complex64] {
        &self.ik
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        self.fft.forward_real(values)
    }

    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.fft.inverse_real(coeffs)
    }

    pub fn derivative(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        coeffs.iter().zip(&self.ik).map(|(c, d)| c * d).collect()
    }

    pub fn dealias(&self, coeffs: &mut [Complex64]) {
        for (c, keep) in coeffs.iter_mut().zip(&self.keep) {
            if !keep {
                *c = Complex64::default();
            }
        }
    }

    /// Transform of a pointwise product, truncated by the 2/3 rule.
    pub fn dealiased_product(&self, a: &[f64], b: &[f64]) -> Vec<Complex64> {
        let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        let mut out = self.forward(&prod);
        self.dealias(&mut out);
        out
    }

    /// Fraction of the non-mean spectral energy in the upper third of the retained band.
    pub fn tail_fraction(&self, coeffs: &[Complex64]) -> f64 {
        let cutoff = self.grid.dealias_cutoff() as i64;
        let lower = 2 * cutoff / 3;
        let mut total = 0.0;
        let mut tail = 0.0;
        for (i, c) in coeffs.iter().enumerate() {
            let k = self.grid.mode_index(i).abs();
            if k == 0 || k > cutoff {
                continue;
            }
            total += c.norm_sqr();
            if k > lower {
                tail += c.norm_sqr();
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    pub fn field(&self, coeffs: &[Complex64]) -> SpectralField {
        SpectralField { grid: self.grid, values: self.inverse(coeffs) }
    }
}

/// Index of the element with the largest absolute value (first on ties).
pub(crate) fn argmax_abs(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if v.abs() > values[best].abs() {
            best = i;
        }
    }
    best
}
