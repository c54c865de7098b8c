use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wavemodels::dispersive::{classify_abcd, AbcdParams, ScalarModel};
use wavemodels::error::{Error, Result};
use wavemodels::hyperbolic::{breaking_time, AnalyticProfile, SampledProfile};
use wavemodels::linear::{dispersion_table, PhysicalParams};
use wavemodels::runner::{self, fmt_float, RunOutcome};
use wavemodels::scenario::{InitialData, Model, Scenario};
use wavemodels::spectral::{Grid, SpectralField};
use wavemodels::traveling::petviashvili_continuation;

const EXIT_HALT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "wavemodels",
    version,
    about = "Shallow-water wave model hierarchy",
    after_help = "WAVEMODELS_OUTPUT_DIR overrides the output directory of run and sweep.\nExit codes: 0 success, 1 error, 2 physical halt (breaking or cavitation)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Physical {
    /// Gravitational acceleration [m/s^2].
    #[arg(long, default_value_t = 9.81)]
    g: f64,
    /// Still-water depth [m].
    #[arg(long, default_value_t = 1.0)]
    depth: f64,
}

impl Physical {
    fn params(self) -> Result<PhysicalParams> {
        PhysicalParams::new(self.g, self.depth)
    }
}

#[derive(Args, Clone, Copy)]
struct Coefficients {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, allow_hyphen_values = true)]
    d: f64,
}

#[derive(Args, Clone, Copy)]
struct OptionalCoefficients {
    #[arg(long, allow_hyphen_values = true, requires_all = ["b", "c", "d"])]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Cp,
    Cg,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolitaryModel {
    Kdv,
    Whitham,
    Boussinesq,
}

impl SolitaryModel {
    fn model(self) -> Model {
        match self {
            Self::Kdv => Model::Kdv,
            Self::Whitham => Model::Whitham,
            Self::Boussinesq => Model::Boussinesq,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    /// u0(x) = -amplitude sin(width x), periodic.
    NegSin,
    /// u0(x) = amplitude exp(-(width x)^2) on the line.
    Gaussian,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario (or re-run a manifest) and write snapshots plus manifest.json.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run two scenarios from the same initial data and report relative L2 differences in zeta.
    Compare {
        #[arg(long)]
        config_a: PathBuf,
        #[arg(long)]
        config_b: PathBuf,
        /// InitialData JSON injected into both scenarios.
        #[arg(long)]
        initial: PathBuf,
    },
    /// Phase and group velocity of the linear water-wave dispersion relation.
    Dispersion {
        #[arg(long)]
        ximax: f64,
        #[arg(long)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Quantity::Both)]
        quantity: Quantity,
        #[command(flatten)]
        physical: Physical,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solitary-wave profile, or an amplitude-speed sweep with --sweep-to.
    Solitary {
        #[arg(long, value_enum)]
        model: SolitaryModel,
        /// Speed as a multiple of the long-wave speed sqrt(g H).
        #[arg(long)]
        speed: f64,
        /// Final speed ratio of an amplitude-speed sweep.
        #[arg(long)]
        sweep_to: Option<f64>,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 200.0)]
        length: f64,
        #[arg(long, default_value_t = 1024)]
        nodes: usize,
        #[command(flatten)]
        physical: Physical,
        #[command(flatten)]
        abcd: OptionalCoefficients,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Breaking time of a simple wave with initial velocity u0.
    Shocktime {
        /// CSV with columns x, u on a uniform periodic grid starting at -L/2.
        #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
        profile: Option<PathBuf>,
        #[arg(long, value_enum)]
        builtin: Option<Builtin>,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        amplitude: f64,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
    },
    /// Linear well-posedness verdict for an abcd parameter set.
    Classify {
        #[command(flatten)]
        abcd: Coefficients,
        #[command(flatten)]
        physical: Physical,
    },
    /// Run several scenarios on a worker pool.
    Sweep {
        #[arg(long = "config", required = true, num_args = 1..)]
        configs: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn execute(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run { config } => {
            let scenario = Scenario::load(&config)?;
            let out = runner::run(&scenario)?;
            report_run(&config, &out);
            Ok(if out.halted() { ExitCode::from(EXIT_HALT) } else { ExitCode::SUCCESS })
        }
        Command::Compare { config_a, config_b, initial } => {
            let a = Scenario::load(&config_a)?;
            let b = Scenario::load(&config_b)?;
            let shared: InitialData = serde_json::from_str(&std::fs::read_to_string(&initial)?)?;
            print_json(&runner::compare(&a, &b, &shared)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Dispersion { ximax, samples, quantity, physical, output } => {
            let rows = dispersion_table(ximax, samples, &physical.params()?)?;
            let mut w = sink(output.as_deref())?;
            match quantity {
                Quantity::Both => writeln!(w, "xi [1/m],c_p [m/s],c_g [m/s]")?,
                Quantity::Cp => writeln!(w, "xi [1/m],c_p [m/s]")?,
                Quantity::Cg => writeln!(w, "xi [1/m],c_g [m/s]")?,
            }
            for (xi, cp, cg) in rows {
                match quantity {
                    Quantity::Both => writeln!(w, "{},{},{}", fmt_float(xi), fmt_float(cp), fmt_float(cg))?,
                    Quantity::Cp => writeln!(w, "{},{}", fmt_float(xi), fmt_float(cp))?,
                    Quantity::Cg => writeln!(w, "{},{}", fmt_float(xi), fmt_float(cg))?,
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Solitary { model, speed, sweep_to, steps, length, nodes, physical, abcd, output } => {
            let p = physical.params()?;
            let grid = Grid::new_1d(length, nodes)?;
            let abcd = match (abcd.a, abcd.b, abcd.c, abcd.d) {
                (Some(a), Some(b), Some(c), Some(d)) => Some(AbcdParams::new(a, b, c, d)?),
                _ => None,
            };
            match sweep_to {
                None => solitary_profile(model.model(), abcd.as_ref(), speed, &p, &grid, output.as_deref()),
                Some(to) => {
                    solitary_sweep(model.model(), abcd.as_ref(), speed, to, steps, &p, &grid, output.as_deref())
                }
            }
        }
        Command::Shocktime { profile, builtin, amplitude, width } => {
            let t = match (profile, builtin) {
                (Some(path), _) => breaking_time(&SampledProfile::new(&read_profile(&path)?)?),
                (None, Some(Builtin::NegSin)) => {
                    let period = 2.0 * std::f64::consts::PI / width;
                    breaking_time(&AnalyticProfile::periodic(
                        |x| -amplitude * (width * x).sin(),
                        |x| -amplitude * width * (width * x).cos(),
                        (-0.5 * period, 0.5 * period),
                        4096,
                    ))
                }
                (None, Some(Builtin::Gaussian)) => {
                    let reach = 8.0 / width;
                    breaking_time(&AnalyticProfile::on_line(
                        |x| amplitude * (-(width * x).powi(2)).exp(),
                        |x| -2.0 * width * width * x * amplitude * (-(width * x).powi(2)).exp(),
                        (-reach, reach),
                        4096,
                    ))
                }
                (None, None) => return Err(Error::InvalidParameter("give --profile or --builtin".into())),
            };
            println!("{}", fmt_float(t));
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { abcd, physical } => {
            let params = AbcdParams::new(abcd.a, abcd.b, abcd.c, abcd.d)?;
            print_json(&classify_abcd(&params, &physical.params()?))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { configs } => {
            let scenarios = configs.iter().map(|c| Scenario::load(c)).collect::<Result<Vec<_>>>()?;
            let mut code = ExitCode::SUCCESS;
            let mut failed = false;
            for (config, outcome) in configs.iter().zip(runner::sweep(&scenarios)) {
                match outcome {
                    Ok(out) => {
                        report_run(config, &out);
                        if out.halted() {
                            code = ExitCode::from(EXIT_HALT);
                        }
                    }
                    Err(e) => {
                        eprintln!("{}: error: {e}", config.display());
                        failed = true;
                    }
                }
            }
            Ok(if failed { ExitCode::FAILURE } else { code })
        }
    }
}

fn report_run(config: &Path, out: &RunOutcome) {
    let m = &out.manifest;
    match &m.halt {
        None => {
            println!("{}: completed, {} snapshots in {}", config.display(), m.snapshots.len(), out.directory.display())
        }
        Some(h) => println!(
            "{}: halted ({:?}) at t = {} near x = {}, {} snapshots in {}",
            config.display(),
            h.kind,
            fmt_float(h.time),
            fmt_float(h.location),
            m.snapshots.len(),
            out.directory.display()
        ),
    }
}

/// Reads `x, u` rows laid out on a periodic grid `x_j = -L/2 + j L/N`.
fn read_profile(path: &Path) -> Result<SpectralField> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let parse = |i: usize| -> Result<f64> {
            row.get(i)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::InvalidParameter(format!("bad profile row {:?}", row)))
        };
        xs.push(parse(0)?);
        us.push(parse(1)?);
    }
    if xs.len() < 4 {
        return Err(Error::InvalidParameter("profile needs at least 4 samples".into()));
    }
    let n = xs.len();
    let dx = xs[1] - xs[0];
    let grid = Grid::new_1d(dx * n as f64, n)?;
    let expected = grid.coordinates();
    if xs.iter().zip(&expected).any(|(a, b)| (a - b).abs() > 1e-9 * grid.length()) {
        return Err(Error::InvalidGrid("profile nodes must be uniform and start at -L/2".into()));
    }
    SpectralField::new(grid, us)
}

fn solitary_profile(
    model: Model,
    abcd: Option<&AbcdParams>,
    ratio: f64,
    p: &PhysicalParams,
    grid: &Grid,
    output: Option<&Path>,
) -> Result<ExitCode> {
    let sol = runner::solitary_for_model(model, abcd, ratio * p.c0(), p, grid)?;
    eprintln!(
        "{} speed {} amplitude {} residual {} iterations {}",
        model.name(),
        fmt_float(sol.speed),
        fmt_float(sol.amplitude()),
        fmt_float(sol.residual),
        sol.iterations
    );
    let mut w = sink(output)?;
    match &sol.profile_u {
        Some(_) => writeln!(w, "x [m],zeta [m],u [m/s]")?,
        None => writeln!(w, "x [m],zeta [m]")?,
    }
    let xs = grid.coordinates();
    for (i, x) in xs.iter().enumerate() {
        write!(w, "{},{}", fmt_float(*x), fmt_float(sol.profile_zeta.values()[i]))?;
        if let Some(u) = &sol.profile_u {
            write!(w, ",{}", fmt_float(u.values()[i]))?;
        }
        writeln!(w)?;
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn solitary_sweep(
    model: Model,
    abcd: Option<&AbcdParams>,
    from: f64,
    to: f64,
    steps: usize,
    p: &PhysicalParams,
    grid: &Grid,
    output: Option<&Path>,
) -> Result<ExitCode> {
    let c0 = p.c0();
    let mut rows: Vec<(f64, f64, f64, usize)> = Vec::new();
    let mut failure = None;
    if model == Model::Whitham {
        let report =
            petviashvili_continuation(ScalarModel::Whitham, from * c0, to * c0, steps, p, grid, 1e-10, 20_000)?;
        rows.extend(report.steps.iter().map(|s| (s.speed, s.amplitude, s.residual, s.iterations)));
        failure = report.failure.map(|f| format!("diverged at speed ratio {}: {}", fmt_float(f.speed / c0), f.reason));
    } else {
        let steps = steps.max(1);
        for k in 0..=steps {
            let ratio = from * (to / from).powf(k as f64 / steps as f64);
            match runner::solitary_for_model(model, abcd, ratio * c0, p, grid) {
                Ok(sol) => rows.push((sol.speed, sol.amplitude(), sol.residual, sol.iterations)),
                Err(e) => {
                    failure = Some(format!("failed at speed ratio {}: {e}", fmt_float(ratio)));
                    break;
                }
            }
        }
    }
    let mut w = sink(output)?;
    writeln!(w, "speed_ratio,speed [m/s],amplitude [m],residual,iterations")?;
    for (speed, amp, res, it) in &rows {
        writeln!(w, "{},{},{},{},{it}", fmt_float(speed / c0), fmt_float(*speed), fmt_float(*amp), fmt_float(*res))?;
    }
    if let Some(msg) = failure {
        eprintln!("{msg}");
    }
    Ok(ExitCode::SUCCESS)
}
