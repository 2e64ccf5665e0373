use alloc::vec::Vec;

use crate::model::ValidationError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid model parameters: {}", join(.0))]
    InvalidParams(Vec<ValidationError>),
    #[error("time {t} lies outside the confidence history [{lower}, 0]")]
    TimeOutsideHistory { t: f64, lower: f64 },
    #[error("time interval [{t0}, {t1}] is outside the rate curve domain [0, {horizon}]")]
    TimeOutOfRange { t0: f64, t1: f64, horizon: f64 },
    #[error("invalid rate curve: {0}")]
    InvalidRates(&'static str),
    #[error("invalid time grid: {0}")]
    InvalidGrid(&'static str),
    #[error("grid step {step} exceeds the information delay {tau}")]
    GridTooCoarse { step: f64, tau: f64 },
    #[error("the minimal martingale measure requires rho = 0 (got {rho})")]
    MeasureRequiresZeroRho { rho: f64 },
    #[error("time {t} is beyond the simulated horizon {horizon}")]
    TimeBeyondHorizon { t: f64, horizon: f64 },
    #[error("at least two samples are required (got {0})")]
    TooFewSamples(usize),
    #[error("sample has zero variance, automatic bandwidth is undefined")]
    DegenerateSample,
    #[error("bandwidth must be positive and finite (got {0})")]
    NonPositiveBandwidth(f64),
    #[error("moment formula denominator vanishes: {0}")]
    DegenerateDenominator(&'static str),
    #[error("maturity {maturity} must exceed the delay window start {start}")]
    WindowTooShort { maturity: f64, start: f64 },
    #[error("argument `{0}` must be positive")]
    NonPositiveArgument(&'static str),
    #[error("invalid contract: {0}")]
    InvalidContract(&'static str),
    #[error("invalid quadrature settings: {0}")]
    InvalidQuadrature(&'static str),
    #[error("quadrature did not reach tolerance (error estimate {estimate:e})")]
    QuadratureNotConverged { estimate: f64 },
    #[error("payoff is not integrable under the conditional log-normal law")]
    PayoffNotIntegrable,
    #[error("path does not carry stored Brownian increments")]
    MissingIncrements,
    #[error("the density process is defined on paths simulated under the physical measure")]
    PhysicalPathRequired,
    #[error("Monte Carlo estimates need at least {min} paths (got {got})")]
    TooFewPaths { min: usize, got: usize },
}

fn join(errors: &[ValidationError]) -> alloc::string::String {
    use core::fmt::Write;
    let mut out = alloc::string::String::new();
    for (i, e) in errors.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        let _ = write!(out, "{e}");
    }
    out
}
