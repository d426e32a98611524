//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Configuration document could not be parsed at all.
    #[error("config parse error: {0}")]
    Parse(String),

    /// A field violated one of its invariants. `field` names the offending
    /// entry, `constraint` states the invariant that failed.
    #[error("validation error: field `{field}` violates `{constraint}`: {detail}")]
    Validation {
        field: String,
        constraint: String,
        detail: String,
    },

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Grid construction or state/grid compatibility failure.
    #[error("grid error: {0}")]
    Grid(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: requested {requested:e}, achieved {achieved:e}")]
    QuadratureNonConvergence { requested: f64, achieved: f64 },

    /// A numerical health check failed during a run (boundary breach,
    /// overlap magnitude out of range, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Phase samples too far apart to unwrap by continuity.
    #[error(
        "phase unwrap cadence violated at t={t}: increment {increment} rad exceeds pi/2; \
         sample more densely"
    )]
    UnwrapCadence { t: f64, increment: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(
        field: impl Into<String>,
        constraint: impl Into<String>,
        detail: impl Into<String>,
    ) -> Self {
        Error::Validation {
            field: field.into(),
            constraint: constraint.into(),
            detail: detail.into(),
        }
    }

    /// Exit-code class used by the command line front end: 2 for anything
    /// wrong with the inputs, 3 for numerical trouble at run time.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Validation { .. } | Error::Domain(_))
    }
}
