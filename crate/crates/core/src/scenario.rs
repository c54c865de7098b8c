//! Versioned JSON scenario files and initial-data construction.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dispersive::{classify_abcd, AbcdParams, Verdict};
use crate::error::{Error, Result};
use crate::hyperbolic::{simple_wave_velocity, BreakingDetector};
use crate::linear::PhysicalParams;
use crate::spectral::{Grid, SpectralField};
use crate::time::DtControl;

pub const SCHEMA_VERSION: u32 = 1;

/// Overrides `output.directory` when set.
pub const OUTPUT_DIR_ENV: &str = "WAVEMODELS_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Acoustic,
    Airy,
    SaintVenant,
    Hopf,
    Boussinesq,
    Kdv,
    Whitham,
    Whitham2,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Acoustic => "acoustic",
            Model::Airy => "airy",
            Model::SaintVenant => "saint_venant",
            Model::Hopf => "hopf",
            Model::Boussinesq => "boussinesq",
            Model::Kdv => "kdv",
            Model::Whitham => "whitham",
            Model::Whitham2 => "whitham2",
        }
    }

    /// Whether the initial data include a second field (`zeta_t`, `psi` or `u`).
    pub fn has_companion(&self) -> bool {
        !matches!(self, Model::Kdv | Model::Whitham | Model::Whitham2)
    }

    /// Name and unit of the second snapshot column, if the model writes one.
    pub fn companion_column(&self) -> Option<(&'static str, &'static str)> {
        match self {
            Model::Acoustic => None,
            Model::Airy => Some(("psi", "m^2/s")),
            Model::SaintVenant | Model::Hopf | Model::Boussinesq => Some(("u", "m/s")),
            Model::Kdv | Model::Whitham | Model::Whitham2 => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub length: f64,
    pub nodes: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { length: 200.0, nodes: 1024 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Gaussian,
    File,
    TravelingWave,
    SimpleWave,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Companion {
    #[default]
    ZeroVelocity,
    FromSimpleWaveRelation,
    Explicit,
}

/// `gaussian`: `ζ0 = amplitude exp(-(width_parameter (x - center))²)` (radial in 2D).
/// `simple_wave`: the same ζ0 with `u0 = 2 sqrt(g(H + ζ0)) - 2 sqrt(gH)`.
/// `file`: CSV with columns `x, zeta[, companion]` on the scenario grid.
/// `traveling_wave`: the model's solitary wave at `speed_ratio * c0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    pub kind: InitialKind,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default = "one")]
    pub width_parameter: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default)]
    pub companion: Companion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_ratio: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl InitialData {
    pub fn gaussian(amplitude: f64, width_parameter: f64) -> Self {
        Self {
            kind: InitialKind::Gaussian,
            amplitude,
            width_parameter,
            center: 0.0,
            companion: Companion::ZeroVelocity,
            path: None,
            speed_ratio: None,
        }
    }

    pub fn simple_wave(amplitude: f64, width_parameter: f64) -> Self {
        Self {
            kind: InitialKind::SimpleWave,
            companion: Companion::FromSimpleWaveRelation,
            ..Self::gaussian(amplitude, width_parameter)
        }
    }

    pub fn traveling_wave(speed_ratio: f64) -> Self {
        Self { kind: InitialKind::TravelingWave, speed_ratio: Some(speed_ratio), ..Self::gaussian(0.0, 1.0) }
    }

    fn profile(&self, grid: &Grid) -> SpectralField {
        let (a, w, c) = (self.amplitude, self.width_parameter, self.center);
        SpectralField::from_fn(*grid, |x, y| a * (-(w * w) * ((x - c).powi(2) + y * y)).exp())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Time between snapshots; the final time is always written.
    pub stride: f64,
    pub directory: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub model: Model,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub physical: PhysicalParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abcd: Option<AbcdParams>,
    #[serde(default)]
    pub grid: GridSpec,
    pub initial: InitialData,
    pub t_end: f64,
    pub output: OutputSpec,
    #[serde(default)]
    pub dt_control: DtControl,
    /// Gradient blow-up factor for saint_venant runs.
    #[serde(default = "default_blowup")]
    pub blowup_factor: f64,
}

fn default_dim() -> usize {
    1
}

fn default_blowup() -> f64 {
    BreakingDetector::default().blowup_factor
}

impl Scenario {
    pub fn new(model: Model, initial: InitialData, t_end: f64, output: OutputSpec) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            model,
            dim: 1,
            physical: PhysicalParams::default(),
            abcd: None,
            grid: GridSpec::default(),
            initial,
            t_end,
            output,
            dt_control: DtControl::default(),
            blowup_factor: default_blowup(),
        }
    }

    /// Reads a scenario, or the scenario embedded in a run manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let scenario_value = match value.get("scenario") {
            Some(inner) if value.get("manifest_version").is_some() => inner.clone(),
            _ => value,
        };
        let mut s: Scenario = serde_json::from_value(scenario_value)?;
        if let (Some(p), Some(base)) = (s.initial.path.as_mut(), path.parent()) {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(s)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.grid.length, self.grid.nodes)
    }

    /// Output directory after the environment override.
    pub fn output_directory(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output.directory.clone(),
        }
    }

    /// Every violated invariant, or `Ok`.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            errs.push(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if !(self.dim == 1 || self.dim == 2) {
            errs.push(format!("dim must be 1 or 2, got {}", self.dim));
        } else if self.dim == 2 && !matches!(self.model, Model::Acoustic | Model::Airy) {
            errs.push(format!("dim = 2 is only available for acoustic and airy, not {}", self.model.name()));
        }
        if let Err(e) = self.physical.validated() {
            errs.push(e.to_string());
        }
        if self.dim == 1 || self.dim == 2 {
            if let Err(e) = self.grid() {
                errs.push(e.to_string());
            }
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            errs.push(format!("t_end must be finite and non-negative, got {}", self.t_end));
        }
        if !(self.output.stride.is_finite() && self.output.stride > 0.0) {
            errs.push(format!("output.stride must be positive, got {}", self.output.stride));
        }
        let dt = &self.dt_control;
        if !(dt.cfl > 0.0 && dt.cfl.is_finite() && dt.dt_max > 0.0 && dt.dt_min >= 0.0) {
            errs.push("dt_control needs cfl > 0, dt_max > 0 and dt_min >= 0".into());
        }
        if !(self.blowup_factor > 0.0) {
            errs.push(format!("blowup_factor must be positive, got {}", self.blowup_factor));
        }
        match (self.model, &self.abcd) {
            (Model::Boussinesq, None) => errs.push("model boussinesq requires abcd parameters".into()),
            (Model::Boussinesq, Some(abcd)) => match abcd.validated() {
                Err(e) => errs.push(e.to_string()),
                Ok(abcd) => {
                    if self.physical.validated().is_ok()
                        && classify_abcd(&abcd, &self.physical).verdict == Verdict::IllPosed
                    {
                        errs.push("abcd parameters are linearly ill-posed".into());
                    }
                    if abcd.b < 0.0 || abcd.d < 0.0 {
                        errs.push("abcd parameters need b >= 0 and d >= 0".into());
                    }
                }
            },
            (_, Some(_)) => errs.push(format!("abcd parameters are not used by model {}", self.model.name())),
            _ => {}
        }
        self.validate_initial(&mut errs);
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    fn validate_initial(&self, errs: &mut Vec<String>) {
        let init = &self.initial;
        if !(init.amplitude.is_finite()
            && init.width_parameter.is_finite()
            && init.width_parameter > 0.0
            && init.center.is_finite())
        {
            errs.push("initial amplitude and center must be finite, width_parameter positive".into());
        }
        let scalar = matches!(self.model, Model::Kdv | Model::Whitham | Model::Whitham2);
        match init.kind {
            InitialKind::File if init.path.is_none() => errs.push("initial kind file requires a path".into()),
            InitialKind::TravelingWave => {
                if !matches!(self.model, Model::Kdv | Model::Whitham | Model::Boussinesq) {
                    errs.push(format!(
                        "traveling_wave data is available for kdv, whitham and boussinesq, not {}",
                        self.model.name()
                    ));
                }
                match init.speed_ratio {
                    Some(r) if r >= 1.0 && r.is_finite() => {}
                    _ => errs.push("traveling_wave data requires speed_ratio >= 1".into()),
                }
            }
            InitialKind::SimpleWave if !matches!(self.model, Model::SaintVenant | Model::Hopf | Model::Boussinesq) => {
                errs.push(format!("simple_wave data needs a velocity companion, which {} lacks", self.model.name()));
            }
            _ => {}
        }
        match init.companion {
            Companion::FromSimpleWaveRelation
                if !matches!(self.model, Model::SaintVenant | Model::Hopf | Model::Boussinesq) =>
            {
                errs.push(format!("from_simple_wave_relation is not meaningful for {}", self.model.name()));
            }
            Companion::Explicit if init.kind != InitialKind::File => {
                errs.push("an explicit companion is read from the third column of an initial file".into());
            }
            Companion::Explicit if scalar => errs.push(format!("{} has no companion variable", self.model.name())),
            _ => {}
        }
        if self.model == Model::Hopf
            && init.companion == Companion::ZeroVelocity
            && init.kind != InitialKind::SimpleWave
        {
            errs.push("hopf evolves simple waves: use simple_wave data or from_simple_wave_relation".into());
        }
    }
}

/// Elevation and companion field at `t = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialFields {
    pub zeta: SpectralField,
    pub companion: Option<SpectralField>,
}

/// Builds the initial fields of a validated scenario.
pub fn build_initial(s: &Scenario) -> Result<InitialFields> {
    let grid = s.grid()?;
    let p = s.physical.validated()?;
    let init = &s.initial;
    let (zeta, explicit) = match init.kind {
        InitialKind::Gaussian | InitialKind::SimpleWave => (init.profile(&grid), None),
        InitialKind::File => {
            let path =
                init.path.as_ref().ok_or_else(|| Error::Config(vec!["initial kind file requires a path".into()]))?;
            let (z, c) = read_initial_csv(path, &grid)?;
            (z, c)
        }
        InitialKind::TravelingWave => {
            let speed = init.speed_ratio.unwrap_or(1.0) * p.c0();
            let sol = crate::runner::solitary_for_model(s.model, s.abcd.as_ref(), speed, &p, &grid)?;
            let zeta = sol.profile_zeta.spectrum().translated(init.center).to_field();
            let u = sol.profile_u.map(|u| u.spectrum().translated(init.center).to_field());
            return Ok(InitialFields { zeta, companion: u.or_else(|| companion_zero(s.model, grid)) });
        }
    };
    let companion = match (init.kind, init.companion) {
        (InitialKind::SimpleWave, _) | (_, Companion::FromSimpleWaveRelation) => Some(simple_wave_velocity(&zeta, &p)?),
        (_, Companion::Explicit) => {
            Some(explicit.ok_or_else(|| Error::Config(vec!["initial file has no companion column".into()]))?)
        }
        (_, Companion::ZeroVelocity) => companion_zero(s.model, grid),
    };
    Ok(InitialFields { zeta, companion })
}

fn companion_zero(model: Model, grid: Grid) -> Option<SpectralField> {
    model.has_companion().then(|| SpectralField::zeros(grid))
}

/// Reads `x, zeta[, companion]` rows (header required) in grid order.
pub fn read_initial_csv(path: &Path, grid: &Grid) -> Result<(SpectralField, Option<SpectralField>)> {
    if grid.dim() != 1 {
        return Err(Error::Config(vec!["initial files are one-dimensional".into()]));
    }
    let mut reader =
        csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_path(path).map_err(csv_error)?;
    let coords = grid.coordinates();
    let mut zeta = Vec::with_capacity(grid.len());
    let mut companion = Vec::new();
    let mut width = None;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let vals = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Config(vec![format!("row {row}: {e}")])))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() < 2 || vals.len() > 3 || width.is_some_and(|w| w != vals.len()) {
            return Err(Error::Config(vec![format!("row {row}: expected 2 or 3 consistent columns")]));
        }
        width = Some(vals.len());
        if row >= coords.len() || (vals[0] - coords[row]).abs() > 1e-9 * grid.length() {
            return Err(Error::Config(vec![format!("row {row}: x does not match the scenario grid")]));
        }
        zeta.push(vals[1]);
        if vals.len() == 3 {
            companion.push(vals[2]);
        }
    }
    if zeta.len() != grid.len() {
        return Err(Error::Config(vec![format!(
            "initial file has {} rows, grid has {} nodes",
            zeta.len(),
            grid.len()
        )]));
    }
    let companion = if companion.is_empty() { None } else { Some(SpectralField::new(*grid, companion)?) };
    Ok((SpectralField::new(*grid, zeta)?, companion))
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(vec![format!("csv: {other:?}")]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn output() -> OutputSpec {
        OutputSpec { stride: 1.0, directory: PathBuf::from("out") }
    }

    #[test]
    fn default_scenario_is_valid() {
        let s = Scenario::new(Model::Airy, InitialData::gaussian(0.01, 1.0), 15.0, output());
        s.validate().unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: Scenario = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"schema_version":1,"model":"airy","initial":{"kind":"gaussian"},"t_end":1,
            "output":{"stride":1,"directory":"o"},"colour":"blue"}"#;
        assert!(serde_json::from_str::<Scenario>(text).is_err());
    }

    #[test]
    fn all_violations_listed() {
        let mut s = Scenario::new(Model::Kdv, InitialData::gaussian(0.01, 1.0), -1.0, output());
        s.dim = 2;
        s.output.stride = 0.0;
        match s.validate() {
            Err(Error::Config(v)) => assert_eq!(v.len(), 3, "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn boussinesq_needs_well_posed_abcd() {
        let mut s = Scenario::new(Model::Boussinesq, InitialData::gaussian(0.25, 0.1f64.sqrt()), 1.0, output());
        assert!(s.validate().is_err());
        s.abcd = Some(AbcdParams::new(1.0 / 3.0, 0.0, 0.0, 0.0).unwrap());
        assert!(s.validate().is_err());
        s.abcd = Some(AbcdParams::new(-1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0).unwrap());
        s.validate().unwrap();
    }

    #[test]
    fn simple_wave_companion() {
        let s = Scenario::new(Model::Hopf, InitialData::simple_wave(0.5, 0.1), 1.0, output());
        s.validate().unwrap();
        let f = build_initial(&s).unwrap();
        let u = f.companion.unwrap();
        let c0 = s.physical.c0();
        let i = s.grid().unwrap().nodes() / 2;
        assert!((u.values()[i] - (2.0 * (9.81f64 * 1.5).sqrt() - 2.0 * c0)).abs() < 1e-14);
    }

    #[test]
    fn initial_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("init.csv");
        let grid = Grid::new_1d(10.0, 8).unwrap();
        let mut text = String::from("x,zeta,u\n");
        for x in grid.coordinates() {
            text.push_str(&format!("{x},{},{}\n", x * 0.1, -x));
        }
        std::fs::write(&path, text).unwrap();
        let (z, u) = read_initial_csv(&path, &grid).unwrap();
        assert_eq!(z.values()[0], -0.5);
        assert_eq!(u.unwrap().values()[7], -3.75);
        let wrong = Grid::new_1d(10.0, 16).unwrap();
        assert!(read_initial_csv(&path, &wrong).is_err());
    }
}
