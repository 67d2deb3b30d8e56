use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("{func}: pole at x = {x}")]
    Pole { func: &'static str, x: f64 },

    #[error("{func} did not converge after {iterations} iterations (last estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        func: &'static str,
        iterations: usize,
        estimate: f64,
        error: f64,
    },

    #[error("{func}: quadrature failed, achieved error {achieved:e} against requested {requested:e}")]
    Quadrature {
        func: &'static str,
        achieved: f64,
        requested: f64,
    },

    #[error("{func}: argument outside the supported working range ({detail})")]
    Range { func: &'static str, detail: String },

    #[error("{func}: loss of precision ({detail})")]
    Precision { func: &'static str, detail: String },

    #[error("{func}: {detail}")]
    Solver { func: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}

pub(crate) fn ensure_positive(func: &'static str, name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(domain(func, format!("{name} must be positive and finite, got {value}")))
    }
}
