use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Hermite order {0} exceeds the supported maximum of {max}", max = crate::modes::HERMITE_MAX_ORDER)]
    UnsupportedOrder(usize),

    #[error("expected a {expected} potential, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid mode index {index:?}: {reason}")]
    InvalidIndex { index: [u32; 3], reason: &'static str },

    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    #[error("quadrature did not converge: value {value:e}, estimated error {error:e}")]
    ToleranceNotMet { value: f64, error: f64 },

    #[error("cross terms need equal detector gaps, got {0} and {1}")]
    GapMismatch(f64, f64),

    #[error("cross terms need equal switching timescales, got {0} and {1}")]
    SwitchingMismatch(f64, f64),

    #[error("massless dispersion evaluated at k = 0")]
    IntegrableSingularity,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("index {n} exceeds the guard of {max}")]
    GuardExceeded { n: usize, max: usize },

    #[error("series did not converge within {terms} terms (partial nu = {partial_nu}, tail bound {tail_bound:e})")]
    TruncationFailure {
        terms: usize,
        partial_nu: f64,
        tail_bound: f64,
    },

    #[error("lattice stiffness matrix has non-positive eigenvalue {0:e}")]
    UnstablePotential(f64),

    #[error("time step {dt} does not resolve the fastest frequency {omega_max} (dt * omega_max must be < 0.1)")]
    StepSize { dt: f64, omega_max: f64 },

    #[error("all residuals are below the noise floor {0:e}")]
    BelowNoise(f64),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("model description: {0}")]
    Model(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
