use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter or argument lies outside the domain of the operation.
    #[error("input domain: {0}")]
    InputDomain(String),

    #[error("no saddle-node bifurcation in range: gamma/mu = {ratio} exceeds 1/4")]
    NoBifurcationInRange { ratio: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// The family violates the non-degeneracy conditions (n odd, n < 2m).
    #[error("degenerate family: {0}")]
    DegenerateFamily(String),

    #[error("Newton iteration did not converge after {steps} steps (last iterate {last}, residual {residual:e})")]
    NoConvergence {
        last: Complex64,
        residual: f64,
        steps: usize,
    },

    #[error("Newton map singular at {at}: |g'(z) - 1| = {gap:e}")]
    NewtonSingular { at: Complex64, gap: f64 },

    /// Passage measurement did not complete; carries what was observed so far.
    #[error("passage measurement failed after {steps} steps at x = {last}: {reason}")]
    MeasurementFailed {
        reason: String,
        steps: u64,
        last: f64,
        entered_at: Option<u64>,
    },

    #[error("contour degenerate: fixed point within {distance:e} of node {node}")]
    ContourDegenerate { node: usize, distance: f64 },

    #[error("contour encloses {count} fixed points, expected exactly 1")]
    ContourContent { count: i64 },

    #[error("quadrature did not converge: {0}")]
    QuadratureFailed(String),

    #[error("division domain: {0}")]
    DivisionDomain(String),

    #[error("fit degenerate: {0}")]
    FitDegenerate(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("no escaping point found with |Im z| <= {limit:e}; widen the scan")]
    WidenScan { limit: f64 },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure_finite(z: Complex64, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InputDomain(format!("{what} must be finite, got {z}")))
    }
}

pub(crate) fn ensure_finite_real(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InputDomain(format!("{what} must be finite, got {x}")))
    }
}
