use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigen iteration did not converge after {iterations} iterations (last residual {residual:.3e})")]
    EigenNoConvergence { iterations: usize, residual: f64 },

    #[error("principal eigenvector has mixed signs at interior points; refine the grid")]
    MixedSign,

    #[error("no infection loop: next-generation operator is nilpotent (a1*N1 = {a1n1}, a2*N2 = {a2n2})")]
    NoInfectionLoop { a1n1: f64, a2n2: f64 },

    #[error("no endemic equilibrium: a1*a2*N1*N2 = {product} <= gamma*d = {loss}")]
    NoEquilibrium { product: f64, loss: f64 },

    #[error("stability failure at t = {t}: {detail}; try a smaller dt")]
    Stability { t: f64, detail: String },

    #[error("non-finite value in {field} at t = {t}")]
    NonFinite { t: f64, field: &'static str },

    #[error("Newton iteration diverged after {iterations} iterations (last residual {residual:.3e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("no sign change of nu*u'(0) - c on the sampled bracket: {samples:?}")]
    NoBracket { samples: Vec<(f64, f64)> },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParam { .. } | Error::Config(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}
