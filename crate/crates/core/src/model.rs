//! Parameter containers, validation and deterministic market primitives.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A reason why a [`ModelParams`] value is rejected by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ValidationError {
    #[error("initial confidence must be strictly positive on [-L, 0] (min {min})")]
    NonPositivePhi { min: f64 },
    #[error("initial confidence curve does not cover [-L, 0]")]
    HistoryNotCovered,
    #[error("history length L must be positive (got {0})")]
    NonPositiveHistory(f64),
    #[error("delay must satisfy 0 < tau < L (tau = {tau}, L = {history})")]
    DelayExceedsHistory { tau: f64, history: f64 },
    #[error("sigma_S must be positive (got {0})")]
    NonPositiveSigmaS(f64),
    #[error("sigma_P must be non-negative (got {0})")]
    NegativeSigmaP(f64),
    #[error("drifts mu_P and mu_S must be non-zero (mu_P = {mu_p}, mu_S = {mu_s})")]
    ZeroDrift { mu_p: f64, mu_s: f64 },
    #[error("rho must lie in [0, 1] (got {0})")]
    RhoOutOfRange(f64),
    #[error("initial price must be positive (got {0})")]
    NonPositiveInitialPrice(f64),
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),
}

/// Piecewise-linear confidence history sampled at increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl SampledCurve {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(Error::InvalidGrid("sampled curve needs >= 2 matching (time, value) pairs"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("sampled curve times must be strictly increasing"));
        }
        if times.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("sampled curve contains non-finite values"));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn segment(&self, t: f64) -> usize {
        // index i with times[i] <= t <= times[i + 1]
        match self.times.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => i.min(self.times.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.times.len() - 2),
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        if t == t0 {
            return self.values[i];
        }
        if t == t1 {
            return self.values[i + 1];
        }
        let w = (t - t0) / (t1 - t0);
        self.values[i] + w * (self.values[i + 1] - self.values[i])
    }

    /// Exact integral of the interpolant over `[a, b]`, `a <= b`.
    fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut total = 0.0;
        let mut i = self.segment(a);
        let mut lo = a;
        loop {
            let hi = b.min(self.times[i + 1]);
            if hi > lo {
                total += 0.5 * (hi - lo) * (self.eval(lo) + self.eval(hi));
            }
            if hi >= b || i + 2 >= self.times.len() {
                break;
            }
            lo = hi;
            i += 1;
        }
        total
    }
}

/// Deterministic confidence history `φ` on `[-L, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialConfidence {
    /// `φ ≡ P0`.
    Constant(f64),
    /// Linear interpolation between samples.
    Sampled(SampledCurve),
}

/// Dynamics of the confidence index `dP = μ_P P dt + σ_P P dZ`, `P = φ` on `[-L, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceParams {
    pub mu: f64,
    pub sigma: f64,
    /// History length `L`.
    pub history: f64,
    pub initial: InitialConfidence,
}

impl ConfidenceParams {
    pub fn constant(mu: f64, sigma: f64, history: f64, p0: f64) -> Self {
        Self { mu, sigma, history, initial: InitialConfidence::Constant(p0) }
    }

    /// Evaluates `φ(t)` for `t ∈ [-L, 0]`.
    pub fn phi(&self, t: f64) -> Result<f64> {
        if !(t >= -self.history && t <= 0.0) {
            return Err(Error::TimeOutsideHistory { t, lower: -self.history });
        }
        Ok(self.phi_unchecked(t))
    }

    pub(crate) fn phi_unchecked(&self, t: f64) -> f64 {
        match &self.initial {
            InitialConfidence::Constant(c) => *c,
            InitialConfidence::Sampled(curve) => curve.eval(t),
        }
    }

    /// `φ(0)`, the starting value of the confidence diffusion.
    pub fn p0(&self) -> f64 {
        self.phi_unchecked(0.0)
    }

    /// `∫_a^b φ(u) du` for `-L <= a <= b <= 0`, exact for both representations.
    pub fn phi_integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match &self.initial {
            InitialConfidence::Constant(c) => c * (b - a),
            InitialConfidence::Sampled(curve) => curve.integral(a, b),
        }
    }

    fn min_phi(&self) -> f64 {
        match &self.initial {
            InitialConfidence::Constant(c) => *c,
            InitialConfidence::Sampled(curve) => {
                let lo = -self.history;
                let inner = curve
                    .times
                    .iter()
                    .zip(&curve.values)
                    .filter(|(t, _)| **t > lo && **t < 0.0)
                    .map(|(_, v)| *v);
                inner
                    .chain([curve.eval(lo), curve.eval(0.0)])
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Full parameter set of the bivariate delayed model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub confidence: ConfidenceParams,
    pub mu_s: f64,
    pub sigma_s: f64,
    /// Information delay `τ`.
    pub tau: f64,
    /// Correlation between the price and confidence noises.
    pub rho: f64,
    pub s0: f64,
}

impl ModelParams {
    /// Checks every invariant, returning the complete list of violations.
    pub fn check(&self) -> core::result::Result<(), Vec<ValidationError>> {
        let mut errors = Vec::new();
        let c = &self.confidence;
        let scalars = [
            ("mu_P", c.mu),
            ("sigma_P", c.sigma),
            ("L", c.history),
            ("mu_S", self.mu_s),
            ("sigma_S", self.sigma_s),
            ("tau", self.tau),
            ("rho", self.rho),
            ("s0", self.s0),
        ];
        for (name, v) in scalars {
            if !v.is_finite() {
                errors.push(ValidationError::NonFinite(name));
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        if c.history <= 0.0 {
            errors.push(ValidationError::NonPositiveHistory(c.history));
        }
        if let InitialConfidence::Sampled(curve) = &c.initial {
            if curve.times[0] > -c.history || *curve.times.last().unwrap() < 0.0 {
                errors.push(ValidationError::HistoryNotCovered);
            }
        }
        let min = c.min_phi();
        if !(min > 0.0) {
            errors.push(ValidationError::NonPositivePhi { min });
        }
        if !(self.tau > 0.0 && self.tau < c.history) {
            errors.push(ValidationError::DelayExceedsHistory { tau: self.tau, history: c.history });
        }
        if !(self.sigma_s > 0.0) {
            errors.push(ValidationError::NonPositiveSigmaS(self.sigma_s));
        }
        if c.sigma < 0.0 {
            errors.push(ValidationError::NegativeSigmaP(c.sigma));
        }
        if c.mu == 0.0 || self.mu_s == 0.0 {
            errors.push(ValidationError::ZeroDrift { mu_p: c.mu, mu_s: self.mu_s });
        }
        if !(0.0..=1.0).contains(&self.rho) {
            errors.push(ValidationError::RhoOutOfRange(self.rho));
        }
        if !(self.s0 > 0.0) {
            errors.push(ValidationError::NonPositiveInitialPrice(self.s0));
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        self.check().map_err(Error::InvalidParams)
    }

    /// Deterministic head `X_τ^τ = ∫_{-τ}^0 φ(u) du`.
    pub fn head(&self) -> f64 {
        self.confidence.phi_integral(-self.tau, 0.0)
    }

    /// `X_t^τ` for `t ∈ [0, τ]`, i.e. `∫_{-τ}^{t-τ} φ(u) du`.
    pub fn deterministic_info(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.tau);
        self.confidence.phi_integral(-self.tau, t - self.tau)
    }
}

/// Returns the parameters unchanged when every invariant holds.
pub fn validate(params: ModelParams) -> core::result::Result<ModelParams, Vec<ValidationError>> {
    params.check().map(|()| params)
}

/// Piecewise-constant deterministic short rate starting at time 0.
///
/// Segment `i` covers `(end_{i-1}, end_i]` with `end_{-1} = 0`; the last end
/// may be `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatesCurve {
    segments: Vec<(f64, f64)>,
}

impl RatesCurve {
    pub fn new(segments: Vec<(f64, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidRates("at least one segment is required"));
        }
        let mut prev = 0.0;
        for &(end, rate) in &segments {
            if !(end > prev) {
                return Err(Error::InvalidRates("segment end-times must be strictly increasing and positive"));
            }
            if !rate.is_finite() {
                return Err(Error::InvalidRates("rates must be finite"));
            }
            prev = end;
        }
        Ok(Self { segments })
    }

    /// Constant rate on `[0, ∞)`.
    pub fn flat(rate: f64) -> Self {
        Self { segments: alloc::vec![(f64::INFINITY, rate)] }
    }

    pub fn horizon(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.0)
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segments
    }

    /// Instantaneous rate at `t` (right-continuous at segment ends is not
    /// needed since only integrals enter the model).
    pub fn rate_at(&self, t: f64) -> f64 {
        self.segments
            .iter()
            .find(|(end, _)| t <= *end)
            .or(self.segments.last())
            .map_or(0.0, |s| s.1)
    }

    /// `∫_{t0}^{t1} r(u) du`, exact for piecewise-constant rates.
    pub fn integral(&self, t0: f64, t1: f64) -> Result<f64> {
        let horizon = self.horizon();
        if !(t0 >= 0.0 && t0 <= t1 && t1 <= horizon) {
            return Err(Error::TimeOutOfRange { t0, t1, horizon });
        }
        let mut total = 0.0;
        let mut start = 0.0;
        for &(end, rate) in &self.segments {
            let lo = t0.max(start);
            let hi = t1.min(end);
            if hi > lo {
                total += rate * (hi - lo);
            }
            if end >= t1 {
                break;
            }
            start = end;
        }
        Ok(total)
    }

    /// `exp(-∫_{t0}^{t1} r(u) du)`.
    pub fn discount_factor(&self, t0: f64, t1: f64) -> Result<f64> {
        Ok(libm::exp(-self.integral(t0, t1)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContractKind {
    VanillaCall,
    VanillaPut,
    CashOrNothingCall,
}

impl ContractKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::VanillaCall => "vanilla_call",
            Self::VanillaPut => "vanilla_put",
            Self::CashOrNothingCall => "cash_or_nothing_call",
        }
    }
}

impl fmt::Display for ContractKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// European contract on `S_T`. Arbitrary payoffs go through
/// [`crate::pricing::Payoff`] instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionSpec {
    pub kind: ContractKind,
    pub strike: f64,
    pub maturity: f64,
    /// Cash amount paid by a cash-or-nothing call; ignored otherwise.
    pub payout: f64,
}

impl OptionSpec {
    pub fn call(strike: f64, maturity: f64) -> Self {
        Self { kind: ContractKind::VanillaCall, strike, maturity, payout: 0.0 }
    }

    pub fn put(strike: f64, maturity: f64) -> Self {
        Self { kind: ContractKind::VanillaPut, strike, maturity, payout: 0.0 }
    }

    pub fn cash_or_nothing(strike: f64, maturity: f64, payout: f64) -> Self {
        Self { kind: ContractKind::CashOrNothingCall, strike, maturity, payout }
    }

    /// Contract invariants relative to the model (`T > τ`, positive strike and payout).
    pub fn check(&self, params: &ModelParams) -> Result<()> {
        if !(self.strike > 0.0) {
            return Err(Error::InvalidContract("strike must be positive"));
        }
        if !(self.maturity > params.tau) {
            return Err(Error::WindowTooShort { maturity: self.maturity, start: params.tau });
        }
        if self.kind == ContractKind::CashOrNothingCall && !(self.payout > 0.0) {
            return Err(Error::InvalidContract("cash-or-nothing payout must be positive"));
        }
        Ok(())
    }

    /// Terminal payoff.
    pub fn payoff(&self, s: f64) -> f64 {
        match self.kind {
            ContractKind::VanillaCall => (s - self.strike).max(0.0),
            ContractKind::VanillaPut => (self.strike - s).max(0.0),
            ContractKind::CashOrNothingCall => {
                if s > self.strike {
                    self.payout
                } else {
                    0.0
                }
            }
        }
    }
}
