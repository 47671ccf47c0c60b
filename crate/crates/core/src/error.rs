use thiserror::Error;

/// Errors raised by the solvers in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A reaction or flux failed a structural hypothesis check.
    #[error("validation error: {0}")]
    Validation(String),

    /// An adaptive quadrature or a tail estimate failed to converge.
    #[error("quadrature error: {0}")]
    Quadrature(String),

    /// The local model at a shooting anchor has no admissible growth rate.
    #[error("seed error at anchor {anchor}: {reason}")]
    Seed { anchor: f64, reason: String },

    /// The integrator underflowed its minimum step.
    #[error("step size underflow at v = {at} (h = {step:e})")]
    Step { at: f64, step: f64 },

    /// A root bracket or speed bracket could not be established.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// The reaction violates |f(s)| <= f'(alpha)|s - alpha| while an exact
    /// monostable speed was requested.
    #[error("reaction exceeds its linear bound at s = {worst_point} (ratio {ratio})")]
    Ipof { worst_point: f64, ratio: f64 },

    /// The requested speed lies outside the range where the construction applies.
    #[error("regime error: {0}")]
    Regime(String),

    /// A test function is supported outside the sampled profile window.
    #[error("window error: {0}")]
    Window(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI when reporting failures.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Validation(_) => "validation",
            Error::Quadrature(_) => "quadrature",
            Error::Seed { .. } => "seed",
            Error::Step { .. } => "step",
            Error::Bracket(_) => "bracket",
            Error::Ipof { .. } => "ipof",
            Error::Regime(_) => "regime",
            Error::Window(_) => "window",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
