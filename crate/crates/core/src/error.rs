use thiserror::Error;

/// Coarse classification used by the command line front end to pick an
/// exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: malformed parameters, grids, frames.
    Validation,
    /// The prescribed data admits no surface or curve on the requested domain.
    Infeasible,
    /// A numerical procedure broke down.
    Numeric,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GipError {
    #[error("degenerate surface at ({u}, {v}): |x_u x x_v| = {norm:e}")]
    DegenerateSurface { u: f64, v: f64, norm: f64 },

    #[error("infeasible potential: V({at}) = {value} > 0 (curve potentials are never positive)")]
    InfeasiblePotential { at: f64, value: f64 },

    #[error("non-regular cylindrical surface: axis component a3 = {a3} must be non-zero")]
    NonRegularSurface { a3: f64 },

    #[error("no solution near rho0 = {rho0}: 1 - rho0^2 A(rho0)^2 = {mask} <= 0")]
    NoSolutionHere { rho0: f64, mask: f64 },

    #[error("singular integrand: grid touches rho = {rho} (requires rho > 0)")]
    SingularIntegrand { rho: f64 },

    #[error("infeasible family at xi = {xi}: {constraint} = {value}")]
    FamilyInfeasible {
        xi: f64,
        constraint: &'static str,
        value: f64,
    },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("grid is not uniform (spacing deviates by {deviation:e})")]
    NonUniformGrid { deviation: f64 },

    #[error("requested {requested} states but the grid supports at most {available}")]
    TooManyStates { requested: usize, available: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl GipError {
    pub fn kind(&self) -> ErrorKind {
        use GipError::*;
        match self {
            InfeasiblePotential { .. }
            | NoSolutionHere { .. }
            | FamilyInfeasible { .. }
            | NonRegularSurface { .. } => ErrorKind::Infeasible,
            DegenerateSurface { .. } | Numeric(_) => ErrorKind::Numeric,
            SingularIntegrand { .. }
            | InvariantViolation(_)
            | InvalidFrame(_)
            | NonUniformGrid { .. }
            | TooManyStates { .. }
            | Invalid(_) => ErrorKind::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, GipError>;
