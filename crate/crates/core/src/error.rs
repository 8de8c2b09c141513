use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma function has a pole at {0}")]
    GammaPole(f64),

    #[error("{func}: argument outside domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("flux {0} is an even integer and carries no Aharonov-Bohm effect")]
    TrivialFlux(f64),

    #[error("flux {0} is an odd integer; its reduced value would lie on the boundary of (0,1)")]
    BoundaryFlux(f64),

    #[error("evaluation at the origin where the field is singular")]
    OriginSingularity,

    #[error("azimuthal profile must vanish at the origin, got s(0) = {0}")]
    ProfileNotVanishing(f64),

    #[error("regular part vanishes like r^{rate} at the origin, at least r^{required} is needed")]
    InsufficientDecay { rate: f64, required: f64 },

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    #[error("extension matrix is numerically singular (condition number {0:e})")]
    SingularMatrix(f64),

    #[error("small-argument expansion used at lambda*r = {0}, outside its range")]
    AsymptoticRange(f64),

    #[error("invalid value for `{key}`: {detail}")]
    Config { key: String, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { func, detail: detail.into() }
    }

    pub(crate) fn no_convergence(what: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence { what, detail: detail.into() }
    }

    pub(crate) fn config(key: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Config { key: key.into(), detail: detail.into() }
    }

    /// Process exit code used by the `abq` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } | Error::SingularMatrix(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
