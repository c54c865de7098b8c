//! Restarted GMRES with right preconditioning.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct GmresOptions {
    pub restart: usize,
    pub max_iter: usize,
    /// Stop when `||b - A x|| <= rel_tol * ||b||`.
    pub rel_tol: f64,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { restart: 60, max_iter: 600, rel_tol: 1e-12 }
    }
}

#[derive(Clone, Debug)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` from `x = 0`, with `A` applied by `apply` and the right
/// preconditioner `M^{-1}` by `precondition`.
pub fn gmres(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    precondition: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    opts: &GmresOptions,
) -> Result<GmresOutcome> {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(GmresOutcome { x, residual_norm: 0.0, iterations: 0, converged: true });
    }
    let target = opts.rel_tol * bnorm;
    let m = opts.restart.max(1);
    let mut total = 0;
    let mut r = b.to_vec();
    let mut rnorm = bnorm;

    while total < opts.max_iter {
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / rnorm).collect()];
        let mut hess = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = rnorm;
        let mut k_used = 0;

        for j in 0..m {
            total += 1;
            let mut w = apply(&precondition(&basis[j]));
            for (i, v) in basis.iter().enumerate() {
                let h = dot(&w, v);
                hess[i][j] = h;
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= h * vi;
                }
            }
            let wnorm = norm(&w);
            hess[j + 1][j] = wnorm;
            for i in 0..j {
                let t = cs[i] * hess[i][j] + sn[i] * hess[i + 1][j];
                hess[i + 1][j] = -sn[i] * hess[i][j] + cs[i] * hess[i + 1][j];
                hess[i][j] = t;
            }
            let denom = hess[j][j].hypot(hess[j + 1][j]);
            if denom == 0.0 {
                return Err(Error::SingularJacobian("GMRES breakdown with a zero Hessenberg column".into()));
            }
            cs[j] = hess[j][j] / denom;
            sn[j] = hess[j + 1][j] / denom;
            hess[j][j] = denom;
            hess[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            k_used = j + 1;
            if g[j + 1].abs() <= target || wnorm == 0.0 || total >= opts.max_iter {
                break;
            }
            basis.push(w.iter().map(|v| v / wnorm).collect());
        }

        // Back substitution for the least-squares coefficients.
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let s: f64 = (i + 1..k_used).map(|l| hess[i][l] * y[l]).sum();
            y[i] = (g[i] - s) / hess[i][i];
        }
        let mut update = vec![0.0; n];
        for (yi, v) in y.iter().zip(&basis) {
            for (u, vi) in update.iter_mut().zip(v) {
                *u += yi * vi;
            }
        }
        for (xi, ui) in x.iter_mut().zip(precondition(&update)) {
            *xi += ui;
        }
        let ax = apply(&x);
        r = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        rnorm = norm(&r);
        if rnorm <= target {
            return Ok(GmresOutcome { x, residual_norm: rnorm, iterations: total, converged: true });
        }
    }
    Ok(GmresOutcome { x, residual_norm: rnorm, iterations: total, converged: false })
}
