//! Scenario execution, snapshot and manifest output, cross-model comparison.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersive::{abcd_evolve, scalar_evolve, AbcdParams, BoussinesqState, ScalarModel, ScalarWaveState};
use crate::error::{Error, Result};
use crate::hyperbolic::{
    breaking_time, hopf_characteristic_solve, simple_wave_elevation, steepest_descent_point, sv_evolve,
    BreakingDetector, SampledProfile, SvState,
};
use crate::linear::{acoustic_evolve, airy_evolve, AiryState, PhysicalParams};
use crate::scenario::{build_initial, csv_error, InitialData, Model, Scenario};
use crate::spectral::{derivative, Grid, SpectralField};
use crate::time::{output_times, HaltEvent, HaltKind};
use crate::traveling::{boussinesq_solitary_solve, kdv_soliton, petviashvili_solve, TravelingWaveSolution};

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub zeta: SpectralField,
    /// `psi` (airy) or `u` (saint_venant, hopf, boussinesq).
    pub companion: Option<SpectralField>,
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub snapshots: Vec<Snapshot>,
    pub halt: Option<HaltEvent>,
    /// Analytic breaking time of the simple-wave data, for hopf runs.
    pub breaking_time: Option<f64>,
}

fn snapshot_times(s: &Scenario) -> Vec<f64> {
    let mut times = vec![0.0];
    times.extend(output_times(0.0, s.t_end, Some(s.output.stride)));
    times
}

/// Runs a validated scenario in memory.
pub fn simulate(s: &Scenario) -> Result<Simulation> {
    s.validate()?;
    let p = s.physical;
    let init = build_initial(s)?;
    let zeta0 = init.zeta;
    let grid = *zeta0.grid();
    let companion = init.companion.unwrap_or_else(|| SpectralField::zeros(grid));
    let times = snapshot_times(s);
    let done = |snapshots| Ok(Simulation { snapshots, halt: None, breaking_time: None });

    match s.model {
        Model::Acoustic => done(
            times
                .iter()
                .map(|&t| Ok(Snapshot { time: t, zeta: acoustic_evolve(&zeta0, &companion, &p, t)?, companion: None }))
                .collect::<Result<_>>()?,
        ),
        Model::Airy => {
            let state = AiryState::new(zeta0, companion, 0.0)?;
            done(
                times
                    .iter()
                    .map(|&t| {
                        let e = airy_evolve(&state, &p, t)?;
                        Ok(Snapshot { time: t, zeta: e.zeta, companion: Some(e.psi) })
                    })
                    .collect::<Result<_>>()?,
            )
        }
        Model::SaintVenant => {
            let detector = BreakingDetector { blowup_factor: s.blowup_factor, ..BreakingDetector::default() };
            let traj = sv_evolve(
                &SvState::new(zeta0, companion, 0.0)?,
                &p,
                s.t_end,
                Some(s.output.stride),
                &s.dt_control,
                detector,
            )?;
            let snapshots = traj
                .states
                .into_iter()
                .map(|st| Snapshot { time: st.time, zeta: st.zeta, companion: Some(st.u) })
                .collect();
            Ok(Simulation { snapshots, halt: traj.halt, breaking_time: None })
        }
        Model::Hopf => simulate_hopf(&companion, &p, &times),
        Model::Boussinesq => {
            let abcd = s.abcd.ok_or_else(|| Error::Config(vec!["model boussinesq requires abcd parameters".into()]))?;
            let traj = abcd_evolve(
                &BoussinesqState::new(zeta0, companion, 0.0)?,
                &abcd,
                &p,
                s.t_end,
                Some(s.output.stride),
                &s.dt_control,
            )?;
            let snapshots = traj
                .states
                .into_iter()
                .map(|st| Snapshot { time: st.time, zeta: st.zeta, companion: Some(st.u) })
                .collect();
            Ok(Simulation { snapshots, halt: traj.halt, breaking_time: None })
        }
        Model::Kdv | Model::Whitham | Model::Whitham2 => {
            let model = scalar_model(s.model).expect("scalar model");
            let traj = scalar_evolve(
                &ScalarWaveState::new(zeta0, 0.0, model),
                &p,
                s.t_end,
                Some(s.output.stride),
                &s.dt_control,
            )?;
            let snapshots =
                traj.states.into_iter().map(|st| Snapshot { time: st.time, zeta: st.zeta, companion: None }).collect();
            Ok(Simulation { snapshots, halt: traj.halt, breaking_time: None })
        }
    }
}

fn scalar_model(model: Model) -> Option<ScalarModel> {
    match model {
        Model::Kdv => Some(ScalarModel::Kdv),
        Model::Whitham => Some(ScalarModel::Whitham),
        Model::Whitham2 => Some(ScalarModel::Whitham2),
        _ => None,
    }
}

/// Exact characteristic solution of the Hopf equation, up to the breaking time.
fn simulate_hopf(u0: &SpectralField, p: &PhysicalParams, times: &[f64]) -> Result<Simulation> {
    let profile = SampledProfile::new(u0)?;
    let t_star = breaking_time(&profile);
    let xs = u0.grid().coordinates();
    let mut snapshots = Vec::new();
    for &t in times {
        if t >= t_star {
            let (x_steep, _) = steepest_descent_point(&profile);
            let speed = p.c0() + 1.5 * crate::hyperbolic::Profile::value(&profile, x_steep);
            let l = u0.grid().length();
            let location = (x_steep + speed * t_star + 0.5 * l).rem_euclid(l) - 0.5 * l;
            let last: &Snapshot = snapshots.last().expect("t = 0 precedes any finite breaking time");
            let max_gradient = derivative(last.companion.as_ref().expect("hopf snapshots carry u"), 0, 1)?.max_abs();
            return Ok(Simulation {
                snapshots,
                halt: Some(HaltEvent {
                    kind: HaltKind::Breaking,
                    time: t_star,
                    location,
                    max_gradient,
                    estimated_breaking_time: Some(t_star),
                }),
                breaking_time: Some(t_star),
            });
        }
        let u = SpectralField::new(*u0.grid(), hopf_characteristic_solve(&profile, p, t, &xs)?)?;
        snapshots.push(Snapshot { time: t, zeta: simple_wave_elevation(&u, p), companion: Some(u) });
    }
    Ok(Simulation { snapshots, halt: None, breaking_time: t_star.is_finite().then_some(t_star) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Halted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub dim: usize,
    pub length: f64,
    pub nodes: usize,
    pub spacing: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub file: String,
    pub time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub manifest_version: u32,
    pub code_version: String,
    /// The fully resolved configuration; the manifest can be passed back to `run`.
    pub scenario: Scenario,
    pub grid: GridInfo,
    pub wall_seconds: f64,
    pub status: RunStatus,
    pub halt: Option<HaltEvent>,
    pub breaking_time: Option<f64>,
    pub snapshots: Vec<SnapshotRecord>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub directory: PathBuf,
    pub manifest: Manifest,
}

impl RunOutcome {
    pub fn halted(&self) -> bool {
        self.manifest.status == RunStatus::Halted
    }
}

/// Runs the scenario and writes snapshot CSVs plus `manifest.json` into the output directory.
pub fn run(s: &Scenario) -> Result<RunOutcome> {
    s.validate()?;
    let dir = s.output_directory();
    let start = Instant::now();
    let sim = simulate(s)?;
    let wall_seconds = start.elapsed().as_secs_f64();
    fs::create_dir_all(&dir)?;
    let mut records = Vec::with_capacity(sim.snapshots.len());
    for (i, snap) in sim.snapshots.iter().enumerate() {
        let file = format!("snapshot_{i:05}.csv");
        write_snapshot(&dir.join(&file), s.model, snap)?;
        records.push(SnapshotRecord { file, time: snap.time });
    }
    let grid = s.grid()?;
    let mut resolved = s.clone();
    resolved.output.directory = dir.clone();
    let manifest = Manifest {
        manifest_version: MANIFEST_VERSION,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: resolved,
        grid: GridInfo { dim: grid.dim(), length: grid.length(), nodes: grid.nodes(), spacing: grid.spacing() },
        wall_seconds,
        status: if sim.halt.is_some() { RunStatus::Halted } else { RunStatus::Completed },
        halt: sim.halt,
        breaking_time: sim.breaking_time,
        snapshots: records,
    };
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
    Ok(RunOutcome { directory: dir, manifest })
}

/// 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_snapshot(path: &Path, model: Model, snap: &Snapshot) -> Result<()> {
    let grid = snap.zeta.grid();
    let mut header = vec!["x [m]".to_string()];
    if grid.dim() == 2 {
        header.push("y [m]".into());
    }
    header.push("zeta [m]".into());
    let companion = model.companion_column().zip(snap.companion.as_ref());
    if let Some(((name, unit), _)) = companion {
        header.push(format!("{name} [{unit}]"));
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(&header).map_err(csv_error)?;
    for i in 0..grid.len() {
        let (x, y) = grid.position(i);
        let mut row = vec![fmt_float(x)];
        if grid.dim() == 2 {
            row.push(fmt_float(y));
        }
        row.push(fmt_float(snap.zeta.values()[i]));
        if let Some((_, c)) = companion {
            row.push(fmt_float(c.values()[i]));
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub model_a: String,
    pub model_b: String,
    pub times: Vec<f64>,
    /// `||ζ_a - ζ_b||₂ / max(||ζ_a||₂, ||ζ_b||₂)` at each time (0 when both vanish).
    pub l2_relative_differences: Vec<f64>,
    pub summary: f64,
}

/// Symmetric relative L² difference.
pub fn relative_difference(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    a.grid().ensure_same(b.grid())?;
    let diff = a.linear_combination(1.0, b, -1.0)?.l2_norm();
    let scale = a.l2_norm().max(b.l2_norm());
    Ok(if scale == 0.0 { 0.0 } else { diff / scale })
}

/// Runs both scenarios from the same initial data and compares `ζ` at each snapshot.
pub fn compare(a: &Scenario, b: &Scenario, shared: &InitialData) -> Result<ComparisonReport> {
    if a.grid()? != b.grid()? {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", a.grid, b.grid)));
    }
    if a.t_end != b.t_end || a.output.stride != b.output.stride {
        return Err(Error::InvalidParameter(format!(
            "horizon mismatch: t_end {} / {} and stride {} / {}",
            a.t_end, b.t_end, a.output.stride, b.output.stride
        )));
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    a.initial = shared.clone();
    b.initial = shared.clone();
    let (sa, sb) = rayon::join(|| simulate(&a), || simulate(&b));
    let (sa, sb) = (sa?, sb?);
    let mut times = Vec::new();
    let mut diffs = Vec::new();
    for (x, y) in sa.snapshots.iter().zip(&sb.snapshots) {
        times.push(x.time);
        diffs.push(relative_difference(&x.zeta, &y.zeta)?);
    }
    let summary = diffs.iter().cloned().fold(0.0, f64::max);
    Ok(ComparisonReport {
        model_a: a.model.name().into(),
        model_b: b.model.name().into(),
        times,
        l2_relative_differences: diffs,
        summary,
    })
}

/// Solitary wave of `model` at `speed`: closed form (kdv), Petviashvili (whitham) or Newton (boussinesq).
pub fn solitary_for_model(
    model: Model,
    abcd: Option<&AbcdParams>,
    speed: f64,
    p: &PhysicalParams,
    grid: &Grid,
) -> Result<TravelingWaveSolution> {
    match model {
        Model::Kdv => kdv_soliton(speed, p, grid),
        Model::Whitham => petviashvili_solve(ScalarModel::Whitham, speed, p, grid, 1e-12, 20_000, None),
        Model::Boussinesq => {
            let abcd =
                abcd.ok_or_else(|| Error::Config(vec!["boussinesq solitary waves need abcd parameters".into()]))?;
            boussinesq_solitary_solve(abcd, speed, p, grid, 1e-12)
        }
        other => Err(Error::Unsupported(format!("no solitary-wave solver for {}", other.name()))),
    }
}

/// Runs independent scenarios on the rayon pool; each keeps its own output directory.
pub fn sweep(scenarios: &[Scenario]) -> Vec<Result<RunOutcome>> {
    scenarios.par_iter().map(run).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{InitialKind, OutputSpec};

    fn scenario(model: Model, initial: InitialData, t_end: f64, dir: &Path) -> Scenario {
        let mut s = Scenario::new(model, initial, t_end, OutputSpec { stride: 0.5, directory: dir.to_path_buf() });
        s.grid.nodes = 128;
        s.grid.length = 50.0;
        s
    }

    #[test]
    fn zero_data_gives_zero_snapshots_for_every_model() {
        let dir = tempfile::tempdir().unwrap();
        for model in [
            Model::Acoustic,
            Model::Airy,
            Model::SaintVenant,
            Model::Boussinesq,
            Model::Kdv,
            Model::Whitham,
            Model::Whitham2,
        ] {
            let mut s = scenario(model, InitialData::gaussian(0.0, 1.0), 1.0, dir.path());
            if model == Model::Boussinesq {
                s.abcd = Some(AbcdParams::new(-1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0).unwrap());
            }
            let sim = simulate(&s).unwrap();
            assert_eq!(sim.snapshots.len(), 3, "{model:?}");
            for snap in &sim.snapshots {
                assert_eq!(snap.zeta.max_abs(), 0.0, "{model:?}");
            }
        }
        let s = scenario(Model::Hopf, InitialData::simple_wave(0.0, 1.0), 1.0, dir.path());
        let sim = simulate(&s).unwrap();
        assert!(sim.halt.is_none() && sim.snapshots.iter().all(|x| x.zeta.max_abs() == 0.0));
    }

    #[test]
    fn hopf_run_halts_at_breaking_time() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = scenario(Model::Hopf, InitialData::simple_wave(0.5, 0.1), 40.0, dir.path());
        s.grid.length = 200.0;
        s.grid.nodes = 512;
        s.output.stride = 1.0;
        let out = run(&s).unwrap();
        assert!(out.halted());
        let halt = out.manifest.halt.clone().unwrap();
        let t_star = out.manifest.breaking_time.unwrap();
        assert_eq!(halt.time, t_star);
        assert!(out.manifest.snapshots.last().unwrap().time < t_star);
        let text = fs::read_to_string(out.directory.join(MANIFEST_FILE)).unwrap();
        assert!(text.contains("\"halted\""));
    }

    #[test]
    fn snapshot_format() {
        let dir = tempfile::tempdir().unwrap();
        let s = scenario(Model::Airy, InitialData::gaussian(0.01, 1.0), 1.0, dir.path());
        let out = run(&s).unwrap();
        let text = fs::read_to_string(dir.path().join(&out.manifest.snapshots[0].file)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x [m],zeta [m],psi [m^2/s]");
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "-2.5000000000000000e1");
        assert_eq!(first[1].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    }

    #[test]
    fn compare_same_scenario_is_zero() {
        let dir = tempfile::tempdir().unwrap();
        let s = scenario(Model::Airy, InitialData::gaussian(0.01, 1.0), 2.0, dir.path());
        let rep = compare(&s, &s, &InitialData::gaussian(0.01, 0.5)).unwrap();
        assert!(rep.l2_relative_differences.iter().all(|d| *d == 0.0));
        let mut other = s.clone();
        other.t_end = 3.0;
        assert!(compare(&s, &other, &s.initial).is_err());
        other = s.clone();
        other.grid.nodes = 64;
        assert!(matches!(compare(&s, &other, &s.initial), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn traveling_wave_initial_data() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = scenario(Model::Kdv, InitialData::traveling_wave(1.05), 1.0, dir.path());
        s.grid.length = 200.0;
        s.grid.nodes = 512;
        assert_eq!(s.initial.kind, InitialKind::TravelingWave);
        let sim = simulate(&s).unwrap();
        assert!((sim.snapshots[0].zeta.max_abs() - 0.1).abs() < 1e-12);
    }
}
