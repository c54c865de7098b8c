//! C ABI over `wavemodels`. Every function returns a `WmStatus`; on failure the
//! message is available from `wm_last_error_message` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use wavemodels::dispersive::{classify_abcd, AbcdParams, ScalarModel, ScalarSolver, ScalarWaveState, Verdict};
use wavemodels::error::Error;
use wavemodels::hyperbolic::{breaking_time, SampledProfile};
use wavemodels::linear::{airy_propagator, group_velocity, phase_velocity, PhysicalParams};
use wavemodels::spectral::{Grid, SpectralField};
use wavemodels::time::DtControl;
use wavemodels::traveling::petviashvili_solve;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    /// Breaking or cavitation; the handle keeps the last valid state.
    PhysicalHalt = 4,
    Divergence = 5,
    IllPosed = 6,
    Internal = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WmScalarModel {
    Kdv = 0,
    Whitham = 1,
    Whitham2 = 2,
}

impl From<WmScalarModel> for ScalarModel {
    fn from(m: WmScalarModel) -> Self {
        match m {
            WmScalarModel::Kdv => ScalarModel::Kdv,
            WmScalarModel::Whitham => ScalarModel::Whitham,
            WmScalarModel::Whitham2 => ScalarModel::Whitham2,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WmVerdict {
    /// 1 when well posed, 0 when ill posed.
    pub well_posed: i32,
    /// Wavenumber where `omega^2 < 0` first occurs; NaN when well posed.
    pub witness_wavenumber: f64,
    pub omega_squared_min: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WmSolitary {
    pub amplitude: f64,
    pub residual: f64,
    pub iterations: u64,
}

/// Opaque KdV/Whitham integrator.
pub struct WmScalarSolver {
    solver: ScalarSolver,
    nodes: usize,
    control: DtControl,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> WmStatus {
    match err {
        Error::Cavitation { .. } | Error::Breaking { .. } => WmStatus::PhysicalHalt,
        Error::Divergence { .. } | Error::StepUnderflow { .. } | Error::SingularJacobian(_) => WmStatus::Divergence,
        Error::IllPosed(_) => WmStatus::IllPosed,
        Error::Io(_) | Error::Json(_) => WmStatus::Internal,
        _ => WmStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), WmStatus>) -> WmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WmStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside wavemodels");
            WmStatus::Panic
        }
    }
}

fn fail(err: Error) -> WmStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null(name: &str) -> WmStatus {
    set_error(format!("{name} is null"));
    WmStatus::NullPointer
}

fn params(g: f64, depth: f64) -> Result<PhysicalParams, WmStatus> {
    PhysicalParams::new(g, depth).map_err(fail)
}

/// Copies the last error message of this thread, NUL-terminated, into `buf`.
/// Returns the message length in bytes without the terminator; nothing is
/// written when `buf` is null or `len` is too small.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn wm_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > msg.len() {
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), msg.len());
            *buf.add(msg.len()) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wm_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Phase velocity `omega(xi)/|xi|` of linear water waves.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn wm_phase_velocity(xi: f64, g: f64, depth: f64, out: *mut f64) -> WmStatus {
    guard(|| {
        let p = params(g, depth)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = phase_velocity(xi, &p);
        Ok(())
    })
}

/// Group velocity `omega'(xi)` of linear water waves.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn wm_group_velocity(xi: f64, g: f64, depth: f64, out: *mut f64) -> WmStatus {
    guard(|| {
        let p = params(g, depth)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = group_velocity(xi, &p);
        Ok(())
    })
}

/// Airy propagator on `(zeta^, psi^)` at `|xi|` and time `t`, row-major into `out[4]`.
///
/// # Safety
/// `out` must be null or valid for four writes.
#[no_mangle]
pub unsafe extern "C" fn wm_airy_propagator(xi: f64, t: f64, g: f64, depth: f64, out: *mut f64) -> WmStatus {
    guard(|| {
        let p = params(g, depth)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(xi.is_finite() && t.is_finite()) {
            return Err(fail(Error::InvalidParameter("xi and t must be finite".into())));
        }
        let m = airy_propagator(xi.abs(), &p, t);
        slice::from_raw_parts_mut(out, 4).copy_from_slice(&[m[0][0], m[0][1], m[1][0], m[1][1]]);
        Ok(())
    })
}

/// Linear well-posedness of the abcd system; `a + b + c + d` must equal 1/3.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn wm_classify_abcd(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    g: f64,
    depth: f64,
    out: *mut WmVerdict,
) -> WmStatus {
    guard(|| {
        let p = params(g, depth)?;
        let abcd = AbcdParams::new(a, b, c, d).map_err(fail)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = classify_abcd(&abcd, &p);
        *out = WmVerdict {
            well_posed: i32::from(v.verdict == Verdict::WellPosed),
            witness_wavenumber: v.witness_wavenumber.unwrap_or(f64::NAN),
            omega_squared_min: v.omega_squared_min,
        };
        Ok(())
    })
}

/// Breaking time `-2 / (3 inf u0')` of a simple wave sampled on the periodic grid
/// `x_j = -length/2 + j length/nodes`. Infinite when `u0` never steepens.
///
/// # Safety
/// `u0` must point to `nodes` readable values; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn wm_breaking_time(length: f64, nodes: usize, u0: *const f64, out: *mut f64) -> WmStatus {
    guard(|| {
        if u0.is_null() {
            return Err(null("u0"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = Grid::new_1d(length, nodes).map_err(fail)?;
        let field = SpectralField::new(grid, slice::from_raw_parts(u0, nodes).to_vec()).map_err(fail)?;
        *out = breaking_time(&SampledProfile::new(&field).map_err(fail)?);
        Ok(())
    })
}

/// Solitary wave of a scalar model at `speed_ratio * sqrt(g depth)` by Petviashvili
/// iteration; the profile, centred at `x = 0`, goes to `profile[nodes]`.
///
/// # Safety
/// `profile` must be valid for `nodes` writes; `out` must be valid for one write.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn wm_petviashvili(
    model: WmScalarModel,
    speed_ratio: f64,
    g: f64,
    depth: f64,
    length: f64,
    nodes: usize,
    tol: f64,
    max_iter: u64,
    profile: *mut f64,
    out: *mut WmSolitary,
) -> WmStatus {
    guard(|| {
        if profile.is_null() {
            return Err(null("profile"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let p = params(g, depth)?;
        let grid = Grid::new_1d(length, nodes).map_err(fail)?;
        let sol = petviashvili_solve(model.into(), speed_ratio * p.c0(), &p, &grid, tol, max_iter as usize, None)
            .map_err(fail)?;
        slice::from_raw_parts_mut(profile, nodes).copy_from_slice(sol.profile_zeta.values());
        *out = WmSolitary { amplitude: sol.amplitude(), residual: sol.residual, iterations: sol.iterations as u64 };
        Ok(())
    })
}

/// Creates a KdV/Whitham integrator from `zeta0[nodes]` on the periodic grid of
/// the given length. Free with `wm_scalar_solver_free`.
///
/// # Safety
/// `zeta0` must point to `nodes` readable values; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn wm_scalar_solver_new(
    model: WmScalarModel,
    g: f64,
    depth: f64,
    length: f64,
    nodes: usize,
    zeta0: *const f64,
    out: *mut *mut WmScalarSolver,
) -> WmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if zeta0.is_null() {
            return Err(null("zeta0"));
        }
        let p = params(g, depth)?;
        let grid = Grid::new_1d(length, nodes).map_err(fail)?;
        let zeta = SpectralField::new(grid, slice::from_raw_parts(zeta0, nodes).to_vec()).map_err(fail)?;
        let solver = ScalarSolver::new(&ScalarWaveState::new(zeta, 0.0, model.into()), &p).map_err(fail)?;
        *out = Box::into_raw(Box::new(WmScalarSolver { solver, nodes, control: DtControl::default() }));
        Ok(())
    })
}

/// Caps the time step; `dt_max <= 0` removes the cap.
///
/// # Safety
/// `handle` must come from `wm_scalar_solver_new` and not be freed.
#[no_mangle]
pub unsafe extern "C" fn wm_scalar_solver_set_dt_max(handle: *mut WmScalarSolver, dt_max: f64) -> WmStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        h.control.dt_max = if dt_max > 0.0 { dt_max } else { f64::INFINITY };
        Ok(())
    })
}

/// Integrates up to absolute time `t_end`.
///
/// # Safety
/// `handle` must come from `wm_scalar_solver_new` and not be freed.
#[no_mangle]
pub unsafe extern "C" fn wm_scalar_solver_advance(handle: *mut WmScalarSolver, t_end: f64) -> WmStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        match h.solver.advance_to(t_end, &h.control).map_err(fail)? {
            None => Ok(()),
            Some(halt) => {
                set_error(format!("{:?} at t = {} near x = {}", halt.kind, halt.time, halt.location));
                Err(WmStatus::PhysicalHalt)
            }
        }
    })
}

/// Current time of the integrator.
///
/// # Safety
/// `handle` must come from `wm_scalar_solver_new`; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn wm_scalar_solver_time(handle: *const WmScalarSolver, out: *mut f64) -> WmStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = h.solver.time();
        Ok(())
    })
}

/// Copies the current elevation into `buf[len]`; `len` must be at least the node count.
///
/// # Safety
/// `handle` must come from `wm_scalar_solver_new`; `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn wm_scalar_solver_zeta(handle: *const WmScalarSolver, buf: *mut f64, len: usize) -> WmStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < h.nodes {
            set_error(format!("buffer holds {len} values, {} needed", h.nodes));
            return Err(WmStatus::BufferTooSmall);
        }
        slice::from_raw_parts_mut(buf, h.nodes).copy_from_slice(h.solver.state().zeta.values());
        Ok(())
    })
}

/// Releases an integrator; null is ignored.
///
/// # Safety
/// `handle` must be null or come from `wm_scalar_solver_new` and not be freed already.
#[no_mangle]
pub unsafe extern "C" fn wm_scalar_solver_free(handle: *mut WmScalarSolver) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}
