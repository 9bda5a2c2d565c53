use thiserror::Error;

/// Errors raised by the model, simulation and verification layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("history coverage error: t = {t} is outside [{start}, {end}]")]
    Coverage { t: f64, start: f64, end: f64 },

    /// The damped observer correction divides by |grad V(z)|^2 above the
    /// absorbing level; a vanishing gradient there is refused.
    #[error("degenerate gradient: |grad V(z)| = {norm:e} at V(z) = {level} above the absorbing level")]
    DegenerateGradient { level: f64, norm: f64 },

    #[error("insufficient samples for {check}: all {skipped} samples failed the side conditions")]
    InsufficientSamples { check: String, skipped: usize },

    #[error("insufficient data: {usable} usable rows, at least 3 required")]
    InsufficientData { usable: usize },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
