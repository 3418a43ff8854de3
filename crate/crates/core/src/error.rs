use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value produced at step {step}")]
    NonFinite { step: usize },

    #[error("blow-up guard tripped at step {step}: H1 norm {norm:.6e} exceeds ceiling {ceiling:.6e}")]
    BlowUp { step: usize, norm: f64, ceiling: f64 },

    #[error("vector potential is not divergence free (spectral divergence {0:.3e})")]
    NotDivergenceFree(f64),

    #[error("gauge samples too sparse: spacing {spacing} exceeds time step {dt}")]
    SamplingMismatch { spacing: f64, dt: f64 },

    #[error("insufficient sampling: {0}")]
    InsufficientSampling(String),

    #[error("missing time derivative: {0}")]
    MissingTimeDerivative(&'static str),

    #[error("snapshot format: {0}")]
    Format(String),

    #[error("config{}: {message}", line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
