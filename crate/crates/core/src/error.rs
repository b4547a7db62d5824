use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty basis")]
    EmptyBasis,

    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumbers(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation not supported for {molecule}: {what}")]
    Unsupported { molecule: String, what: String },

    /// Thermal or Bessel tail mass left outside the requested range.
    #[error("{what}: truncated tail mass {tail_mass:.3e} exceeds {limit:.1e}")]
    TailTooLarge {
        what: String,
        tail_mass: f64,
        limit: f64,
    },

    /// Population leaked into the outermost basis shells.
    #[error(
        "basis truncation: population {outer_population:.3e} in the two outermost shells \
         (up to {level_max}) exceeds {limit:.1e}"
    )]
    Truncation {
        outer_population: f64,
        level_max: i32,
        limit: f64,
    },

    #[error("ODE step size underflow at t = {time}")]
    StepSizeUnderflow { time: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("sweep cell (tau = {tau} ps, delta = {delta} rad) failed: {source}")]
    Cell {
        tau: f64,
        delta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("image encoding: {0}")]
    Image(String),

    #[error("malformed CSV: {0}")]
    Csv(String),
}

impl Error {
    /// True for basis-truncation failures, including when wrapped in a cell error.
    pub fn is_truncation(&self) -> bool {
        match self {
            Error::Truncation { .. } => true,
            Error::Cell { source, .. } => source.is_truncation(),
            _ => false,
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::InvalidParameter(_) | Error::Unsupported { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
