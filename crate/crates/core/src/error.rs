use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate metric at (u, v) = ({u}, {v}): det g = {det}")]
    DegenerateMetric { u: f64, v: f64, det: f64 },

    #[error("degenerate metric at grid node ({i}, {j}) = ({u}, {v}): det g = {det}")]
    DegenerateNode {
        i: usize,
        j: usize,
        u: f64,
        v: f64,
        det: f64,
    },

    #[error("grid sizes must be even and positive, got {nu}x{nv}")]
    InvalidGrid { nu: usize, nv: usize },

    #[error("field has {got} values, grid expects {expected}")]
    FieldSize { expected: usize, got: usize },

    #[error("chart `{0}` is not compact in both directions")]
    NotCompact(String),

    #[error("need an even number of at least 8 samples, got {0}")]
    SampleCount(usize),

    #[error("samples are not uniformly spaced over the period (node {index} off by {offset})")]
    NonUniformSpacing { index: usize, offset: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("({m}, {n}) is not an admissible pair: need coprime 1 <= m <= n")]
    NotCoprime { m: u32, n: u32 },

    #[error("curve speed degenerates (min speed {0})")]
    DegenerateCurve(f64),

    #[error("chart `{label}` is not a self-shrinker (sup residual {residual:e} > {tolerance:e})")]
    OffShell {
        label: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("curve left the disk |x| <= {bound} at arc length {s}")]
    Divergence { s: f64, bound: f64 },

    #[error("trace is not closed")]
    OpenTrace,

    #[error("Fourier reconstruction error {error:e} exceeds {tolerance:e}")]
    Reconstruction { error: f64, tolerance: f64 },

    #[error("flow breakdown at t = {t}: {reason}")]
    FlowBreakdown { t: f64, reason: String },

    #[error("unknown example `{0}`")]
    UnknownExample(String),
}
