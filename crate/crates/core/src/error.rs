use thiserror::Error;

/// Errors raised by the analytic formulas, the interferometer engine and the
/// Monte Carlo simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The herald outcome has zero probability, so the posterior over emitted
    /// photon numbers does not exist.
    #[error("posterior undefined: herald outcome t = {t} has zero probability")]
    UndefinedPosterior { t: u64 },

    /// The efficiency needed to reach the requested heralding fidelity lies
    /// outside [0, 1]; `eta` is the raw (unclamped) value.
    #[error("infeasible regime: required detector efficiency {eta} lies outside [0, 1]")]
    Infeasible { eta: f64 },

    #[error("coth^2(r) is singular at r = 0")]
    SingularCoth,

    #[error("resource limit: {what} = {count} exceeds cap {cap}")]
    ResourceLimit { what: &'static str, count: u128, cap: u128 },

    #[error("matrix is not unitary: max |U^dag U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("output distribution not normalized: total probability {total}")]
    Normalization { total: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
