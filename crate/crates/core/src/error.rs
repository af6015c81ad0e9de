use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("energy {energy} does not exceed the asymptotic potential {asymptote}")]
    BelowAsymptote { energy: f64, asymptote: f64 },
    #[error("sampled profile does not settle to its asymptotic values")]
    NonconvergentTail,
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("step budget of {max_steps} exhausted near x = {x}")]
    StiffFailure { max_steps: usize, x: f64 },
    #[error("incident amplitude {0:e} is too small to normalise")]
    DegenerateMatch(f64),
    #[error("reference flux {0} deviates from unity")]
    FluxViolation(f64),
    #[error("quadrature did not converge: error estimate {err:e} exceeds {tol:e}")]
    QuadratureFailure { err: f64, tol: f64 },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("asymptotic values differ: {minus} at -inf vs {plus} at +inf")]
    AsymmetricAsymptotes { minus: f64, plus: f64 },
    #[error("the dispersion has a classically forbidden region")]
    ForbiddenRegion,
    #[error("the dispersion has no classically forbidden region")]
    NoForbiddenRegion,
    #[error("the profile is not a single hump")]
    NotSingleHump,
    #[error("the potential dips below its asymptotic value")]
    NegativePotential,
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("radius {r} is not outside the horizon at {horizon}")]
    InsideHorizon { r: f64, horizon: f64 },
    #[error("coordinate map is not monotone")]
    NonMonotoneMap,
}

impl Error {
    /// True for errors that stem from asking for something the library does not cover.
    pub fn is_unsupported(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedFamily(_)
                | Error::ForbiddenRegion
                | Error::NoForbiddenRegion
                | Error::NotSingleHump
                | Error::NegativePotential
                | Error::AsymmetricAsymptotes { .. }
        )
    }

    /// True for errors raised by an integrator or quadrature that gave up.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StiffFailure { .. }
                | Error::DegenerateMatch(_)
                | Error::QuadratureFailure { .. }
                | Error::FluxViolation(_)
                | Error::NonconvergentTail
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
