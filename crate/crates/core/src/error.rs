use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("symbol `{label}` is not finite at |xi| = {xi}")]
    NonFiniteSymbol { label: String, xi: f64 },

    #[error("axis {axis} out of range for a {dim}D grid")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("derivative order {0} not supported (1..=4)")]
    DerivativeOrder(u32),

    #[error("loss of hyperbolicity: water depth {depth} <= 0 at x = {x}")]
    Cavitation { depth: f64, x: f64 },

    #[error("Riemann invariant ordering violated (r+ <= r-) at node {node}")]
    RiemannOrdering { node: usize },

    #[error("wave breaking: t = {time} is not before the breaking time {breaking_time}")]
    Breaking { time: f64, breaking_time: f64 },

    #[error("singular dispersion symbol at k = {k}")]
    SingularSymbol { k: f64 },

    #[error("ill-posed Boussinesq parameters: {0}")]
    IllPosed(String),

    #[error("time step underflow: dt = {dt} at t = {time}")]
    StepUnderflow { dt: f64, time: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("iteration diverged after {iterations} iterations: {reason}")]
    Divergence {
        iterations: usize,
        reason: String,
        /// Last values of the stabilizing factor (Petviashvili) or residual norms (Newton).
        trace: Vec<f64>,
    },

    #[error("resonant linear operator at xi = {xi}")]
    Resonance { xi: f64 },

    #[error("singular Jacobian: {0}")]
    SingularJacobian(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
