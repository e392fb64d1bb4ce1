use thiserror::Error;

/// Errors raised by the reconstruction library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("atom weights sum to {sum}, expected 1 within 1e-9")]
    WeightSum { sum: f64 },

    #[error("duplicate atom at position {position}")]
    DuplicateAtom { position: f64 },

    #[error("{what} = {value} is out of range ({expected})")]
    Range {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("series too short: need {needed} coefficients, have {available}")]
    Depth { needed: usize, available: usize },

    #[error("degenerate system: {0}")]
    Degenerate(String),

    #[error("no convergence after {cycles} cycles (last increment {last_increment:e})")]
    NonConvergence { cycles: usize, last_increment: f64 },

    #[error("invalid moment data: {0}")]
    Moments(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_disc(z: num_complex::Complex64) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("|z| = {} must be < 1", z.norm())))
    }
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius {r} must lie in [0, 1)")))
    }
}
