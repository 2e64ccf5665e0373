//! Mixture Black–Scholes pricing under the minimal martingale measure.
//!
//! Conditionally on the integrated information `X_{t,T} = x`, the log price
//! at maturity is Gaussian with variance `σ_S² x`, so a European price is
//! the Black–Scholes value with accumulated variance `x` averaged against
//! the law of `X_{t,T}`. That law is the moment-matched log-normal of
//! [`crate::approx`], and the average is taken in its standardized
//! coordinate `z`, `x = shift + u·exp(α + ν z)`, over `[−z_max, z_max]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::approx::{fit_lognormal_window, HeadConvention, LogNormalApprox};
use crate::error::{Error, Result};
use crate::model::{ContractKind, ModelParams, OptionSpec, RatesCurve};
use crate::normal;
use crate::quadrature::{self, AdaptiveOptions};

/// Outer integration rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuterRule {
    AdaptiveSimpson { rel_tol: f64, max_depth: u32 },
    GaussLegendre { nodes: usize },
}

/// Inner rule of the generic-payoff pricer (expectation over the conditional log-normal).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerRule {
    /// Composite Gauss–Legendre in the Gaussian coordinate on fixed panels,
    /// further split at payoff breakpoints.
    Composite { nodes: usize },
    GaussHermite { nodes: usize },
}

/// Quadrature configuration for all mixture pricers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub rule: OuterRule,
    pub inner: InnerRule,
    pub head: HeadConvention,
    /// Half-width of the standardized integration domain.
    pub z_max: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rule: OuterRule::AdaptiveSimpson { rel_tol: 1e-8, max_depth: 40 },
            inner: InnerRule::Composite { nodes: 32 },
            head: HeadConvention::Shifted,
            z_max: 8.0,
        }
    }
}

impl QuadratureSettings {
    pub fn adaptive(rel_tol: f64) -> Self {
        Self { rule: OuterRule::AdaptiveSimpson { rel_tol, max_depth: 40 }, ..Self::default() }
    }

    pub fn gauss_legendre(nodes: usize) -> Self {
        Self { rule: OuterRule::GaussLegendre { nodes }, ..Self::default() }
    }

    pub fn with_head(mut self, head: HeadConvention) -> Self {
        self.head = head;
        self
    }

    pub fn with_inner(mut self, inner: InnerRule) -> Self {
        self.inner = inner;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.rule {
            OuterRule::GaussLegendre { nodes } if nodes < 16 => {
                return Err(Error::InvalidQuadrature("at least 16 Gauss-Legendre nodes are required"))
            }
            OuterRule::AdaptiveSimpson { rel_tol, .. } if !(rel_tol > 0.0 && rel_tol <= 1e-6) => {
                return Err(Error::InvalidQuadrature("rel_tol must lie in (0, 1e-6]"))
            }
            _ => {}
        }
        match self.inner {
            InnerRule::GaussHermite { nodes } if nodes < 16 => {
                return Err(Error::InvalidQuadrature("at least 16 Gauss-Hermite nodes are required"))
            }
            InnerRule::Composite { nodes } if nodes < 8 => {
                return Err(Error::InvalidQuadrature("at least 8 nodes per inner panel are required"))
            }
            _ => {}
        }
        if !(self.z_max >= 6.0) {
            return Err(Error::InvalidQuadrature("z_max must be at least 6"));
        }
        Ok(())
    }
}

/// A quadrature price with its exercise weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceResult {
    pub price: f64,
    /// Share-measure exercise probability; absent for cash-or-nothing contracts.
    pub q1: Option<f64>,
    /// Risk-neutral exercise probability.
    pub q2: f64,
    pub quadrature_error_estimate: f64,
}

/// Information at the pricing date `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketState {
    pub t: f64,
    pub spot: f64,
    /// `P_{t−τ}`, required once `t >= τ`.
    pub delayed_confidence: Option<f64>,
}

impl MarketState {
    pub fn initial(params: &ModelParams) -> Self {
        Self { t: 0.0, spot: params.s0, delayed_confidence: None }
    }
}

/// Black–Scholes kernel `C^BS(t, s, x)` for fixed `(s, K, ∫_t^T r, σ_S)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsKernel {
    pub spot: f64,
    pub strike: f64,
    pub rate_integral: f64,
    pub sigma_s: f64,
}

impl BsKernel {
    pub fn new(t: f64, maturity: f64, spot: f64, strike: f64, rates: &RatesCurve, sigma_s: f64) -> Result<Self> {
        if !(spot > 0.0) {
            return Err(Error::NonPositiveArgument("s"));
        }
        if !(strike > 0.0) {
            return Err(Error::NonPositiveArgument("K"));
        }
        if !(sigma_s > 0.0) {
            return Err(Error::NonPositiveArgument("sigma_S"));
        }
        Ok(Self { spot, strike, rate_integral: rates.integral(t, maturity)?, sigma_s })
    }

    pub fn discount(&self) -> f64 {
        libm::exp(-self.rate_integral)
    }

    fn moneyness(&self) -> f64 {
        libm::log(self.spot / self.strike) + self.rate_integral
    }

    #[inline]
    pub fn d1(&self, x: f64) -> f64 {
        let sd = self.sigma_s * libm::sqrt(x);
        (self.moneyness() + 0.5 * sd * sd) / sd
    }

    #[inline]
    pub fn d2(&self, x: f64) -> f64 {
        self.d1(x) - self.sigma_s * libm::sqrt(x)
    }

    /// `(N(d1), N(d2))`; at `x <= 0` the intrinsic indicator.
    #[inline]
    pub fn probabilities(&self, x: f64) -> (f64, f64) {
        if x > 0.0 {
            let d1 = self.d1(x);
            (normal::cdf(d1), normal::cdf(d1 - self.sigma_s * libm::sqrt(x)))
        } else {
            let itm = if self.moneyness() > 0.0 { 1.0 } else { 0.0 };
            (itm, itm)
        }
    }

    /// `s N(d1) − K e^{−∫r} N(d2)`.
    pub fn price(&self, x: f64) -> f64 {
        let (n1, n2) = self.probabilities(x);
        (self.spot * n1 - self.strike * self.discount() * n2).max(0.0)
    }
}

fn check_variance(x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveArgument("x"))
    }
}

/// `d1(t, s, x) = (log(s/K) + ∫_t^T r + σ_S² x / 2) / (σ_S √x)`.
pub fn d1(t: f64, s: f64, x: f64, strike: f64, maturity: f64, rates: &RatesCurve, sigma_s: f64) -> Result<f64> {
    check_variance(x)?;
    Ok(BsKernel::new(t, maturity, s, strike, rates, sigma_s)?.d1(x))
}

/// `d2 = d1 − σ_S √x`.
pub fn d2(t: f64, s: f64, x: f64, strike: f64, maturity: f64, rates: &RatesCurve, sigma_s: f64) -> Result<f64> {
    check_variance(x)?;
    Ok(BsKernel::new(t, maturity, s, strike, rates, sigma_s)?.d2(x))
}

/// Black–Scholes call value with accumulated variance `σ_S² x` over `[t, T]`.
pub fn bs_price(t: f64, s: f64, x: f64, strike: f64, maturity: f64, rates: &RatesCurve, sigma_s: f64) -> Result<f64> {
    check_variance(x)?;
    Ok(BsKernel::new(t, maturity, s, strike, rates, sigma_s)?.price(x))
}

/// A European payoff for the generic pricer.
pub trait Payoff: Sync {
    fn value(&self, s: f64) -> f64;

    /// Points where the payoff is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl Payoff for OptionSpec {
    fn value(&self, s: f64) -> f64 {
        self.payoff(s)
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.strike]
    }
}

/// Payoff given by a closure.
pub struct FnPayoff<F> {
    f: F,
    kinks: Vec<f64>,
}

impl<F: Fn(f64) -> f64 + Sync> FnPayoff<F> {
    pub fn new(f: F) -> Self {
        Self { f, kinks: Vec::new() }
    }

    pub fn with_breakpoints(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }
}

impl<F: Fn(f64) -> f64 + Sync> Payoff for FnPayoff<F> {
    fn value(&self, s: f64) -> f64 {
        (self.f)(s)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.kinks.clone()
    }
}

/// Forward contract with zero delivery price, `φ(s) = s`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Forward;

impl Payoff for Forward {
    fn value(&self, s: f64) -> f64 {
        s
    }
}

struct Mixture {
    approx: LogNormalApprox,
    z_max: f64,
}

fn fit(params: &ModelParams, maturity: f64, quad: &QuadratureSettings, state: &MarketState) -> Result<Mixture> {
    params.ensure_valid()?;
    quad.validate()?;
    if params.rho != 0.0 {
        return Err(Error::MeasureRequiresZeroRho { rho: params.rho });
    }
    if !(state.spot > 0.0) {
        return Err(Error::NonPositiveArgument("spot"));
    }
    let approx = fit_lognormal_window(params, state.t, maturity, state.delayed_confidence, quad.head)?;
    Ok(Mixture { approx, z_max: quad.z_max })
}

impl Mixture {
    /// `∫ g(x(z)) ϕ(z) dz / ∫ ϕ(z) dz` over the truncated domain, with an
    /// error estimate per component. The last component of `g` must be the
    /// constant 1; it carries the weight integral used for normalization.
    fn integrate<const N: usize>(&self, rule: OuterRule, g: impl Fn(f64) -> [f64; N]) -> Result<([f64; N], [f64; N])> {
        if self.approx.nu2 == 0.0 {
            return Ok((g(self.approx.x_at(0.0)), [0.0; N]));
        }
        let integrand = |z: f64| {
            let w = normal::pdf(z);
            g(self.approx.x_at(z)).map(|v| v * w)
        };
        let (a, b) = (-self.z_max, self.z_max);
        let truncation = 2.0 * normal::cdf(-self.z_max);
        let (value, err) = match rule {
            OuterRule::AdaptiveSimpson { rel_tol, max_depth } => {
                let opts = AdaptiveOptions { rel_tol, max_depth, ..AdaptiveOptions::default() };
                let r = quadrature::adaptive_simpson(integrand, a, b, &opts);
                if !r.converged {
                    return Err(Error::QuadratureNotConverged { estimate: r.error[0] });
                }
                (r.value, r.error)
            }
            OuterRule::GaussLegendre { nodes } => {
                let full = quadrature::integrate_fixed(&quadrature::gauss_legendre(nodes), a, b, &integrand);
                let half = quadrature::integrate_fixed(&quadrature::gauss_legendre(nodes / 2), a, b, &integrand);
                let err = core::array::from_fn(|k| (full[k] - half[k]).abs() + 1e-12 * full[k].abs());
                (full, err)
            }
        };
        let mass = value[N - 1];
        Ok((value.map(|v| v / mass), core::array::from_fn(|k| (err[k] + truncation * value[k].abs()) / mass)))
    }

    fn weights(&self, kernel: &BsKernel, rule: OuterRule) -> Result<([f64; 3], [f64; 3])> {
        self.integrate(rule, |x| {
            let (n1, n2) = kernel.probabilities(x);
            [n1, n2, 1.0]
        })
    }
}

fn require_kind(spec: &OptionSpec, kind: ContractKind) -> Result<()> {
    if spec.kind == kind {
        Ok(())
    } else {
        Err(Error::InvalidContract("contract kind does not match the pricer"))
    }
}

fn kernel_for(params: &ModelParams, rates: &RatesCurve, spec: &OptionSpec, state: &MarketState) -> Result<BsKernel> {
    spec.check(params)?;
    if !(state.t >= 0.0 && state.t < spec.maturity) {
        return Err(Error::WindowTooShort { maturity: spec.maturity, start: state.t });
    }
    BsKernel::new(state.t, spec.maturity, state.spot, spec.strike, rates, params.sigma_s)
}

fn call_at(
    params: &ModelParams,
    rates: &RatesCurve,
    spec: &OptionSpec,
    quad: &QuadratureSettings,
    state: &MarketState,
) -> Result<PriceResult> {
    let kernel = kernel_for(params, rates, spec, state)?;
    let mix = fit(params, spec.maturity, quad, state)?;
    let ([q1, q2, _], [e1, e2, _]) = mix.weights(&kernel, quad.rule)?;
    let disc = kernel.discount();
    Ok(PriceResult {
        price: kernel.spot * q1 - kernel.strike * disc * q2,
        q1: Some(q1),
        q2,
        quadrature_error_estimate: kernel.spot * e1 + kernel.strike * disc * e2,
    })
}

/// Vanilla call at `t = 0`: `S_0 Q1 − K e^{−∫_0^T r} Q2`.
pub fn price_call_quadrature(
    params: &ModelParams,
    rates: &RatesCurve,
    spec: &OptionSpec,
    quad: &QuadratureSettings,
) -> Result<PriceResult> {
    require_kind(spec, ContractKind::VanillaCall)?;
    call_at(params, rates, spec, quad, &MarketState::initial(params))
}

fn binary_at(
    params: &ModelParams,
    rates: &RatesCurve,
    spec: &OptionSpec,
    quad: &QuadratureSettings,
    state: &MarketState,
) -> Result<PriceResult> {
    let kernel = kernel_for(params, rates, spec, state)?;
    let mix = fit(params, spec.maturity, quad, state)?;
    let (q2, e2) = mix.integrate(quad.rule, |x| [kernel.probabilities(x).1, 1.0])?;
    let scale = spec.payout * kernel.discount();
    Ok(PriceResult { price: scale * q2[0], q1: None, q2: q2[0], quadrature_error_estimate: scale * e2[0] })
}

/// Cash-or-nothing call at `t = 0`: `A e^{−∫_0^T r} Q2`.
pub fn price_binary_quadrature(
    params: &ModelParams,
    rates: &RatesCurve,
    spec: &OptionSpec,
    quad: &QuadratureSettings,
) -> Result<PriceResult> {
    require_kind(spec, ContractKind::CashOrNothingCall)?;
    binary_at(params, rates, spec, quad, &MarketState::initial(params))
}

fn put_at(
    params: &ModelParams,
    rates: &RatesCurve,
    spec: &OptionSpec,
    quad: &QuadratureSettings,
    state: &MarketState,
) -> Result<PriceResult> {
    let call = call_at(params, rates, &OptionSpec { kind: ContractKind::VanillaCall, ..*spec }, quad, state)?;
    let disc = rates.discount_factor(state.t, spec.maturity)?;
    Ok(PriceResult {
        price: (call.price - state.spot + spec.strike * disc).max(0.0),
        q1: call.q1.map(|q| 1.0 - q),
        q2: 1.0 - call.q2,
        quadrature_error_estimate: call.quadrature_error_estimate,
    })
}

/// Vanilla put by put–call parity. The weights are the complementary ones,
/// so `price = K e^{−∫r} q2 − S_0 q1`.
pub fn price_put(params: &ModelParams, rates: &RatesCurve, spec: &OptionSpec, quad: &QuadratureSettings) -> Result<PriceResult> {
    require_kind(spec, ContractKind::VanillaPut)?;
    put_at(params, rates, spec, quad, &MarketState::initial(params))
}

/// Prices any [`OptionSpec`] at `t = 0`.
pub fn price_option(params: &ModelParams, rates: &RatesCurve, spec: &OptionSpec, quad: &QuadratureSettings) -> Result<PriceResult> {
    price_option_at(params, rates, spec, quad, &MarketState::initial(params))
}

/// Prices any [`OptionSpec`] at a later date, refitting the mixing law on `[t, T]`.
pub fn price_option_at(
    params: &ModelParams,
    rates: &RatesCurve,
    spec: &OptionSpec,
    quad: &QuadratureSettings,
    state: &MarketState,
) -> Result<PriceResult> {
    match spec.kind {
        ContractKind::VanillaCall => call_at(params, rates, spec, quad, state),
        ContractKind::VanillaPut => put_at(params, rates, spec, quad, state),
        ContractKind::CashOrNothingCall => binary_at(params, rates, spec, quad, state),
    }
}

const INNER_Z: f64 = 12.0;
const INNER_PANELS: usize = 8;

/// Conditional expectation `E[φ(s·exp(R − σ²x/2 + σ√x ξ))]` over a standard normal `ξ`.
#[allow(clippy::too_many_arguments)]
fn conditional_expectation(
    payoff: &dyn Payoff,
    spot: f64,
    rate_integral: f64,
    sigma_s: f64,
    x: f64,
    inner: InnerRule,
    rule: &quadrature::Rule,
    kinks: &[f64],
) -> Result<f64> {
    let sd = sigma_s * libm::sqrt(x.max(0.0));
    let base = libm::log(spot) + rate_integral - 0.5 * sd * sd;
    if sd == 0.0 {
        return Ok(payoff.value(libm::exp(base)));
    }
    let at = |xi: f64| payoff.value(libm::exp(base + sd * xi));
    let value = match inner {
        InnerRule::GaussHermite { .. } => {
            let sqrt2 = core::f64::consts::SQRT_2;
            let sum: f64 = rule.nodes.iter().zip(&rule.weights).map(|(n, w)| w * at(sqrt2 * n)).sum();
            sum / libm::sqrt(core::f64::consts::PI)
        }
        InnerRule::Composite { .. } => {
            let center = sd.min(INNER_Z);
            let (lo, hi) = (center - INNER_Z, center + INNER_Z);
            let mut edges: Vec<f64> = (0..=INNER_PANELS)
                .map(|i| lo + (hi - lo) * i as f64 / INNER_PANELS as f64)
                .chain(
                    kinks
                        .iter()
                        .filter(|k| **k > 0.0)
                        .map(|k| (libm::log(*k) - base) / sd)
                        .filter(|c| *c > lo && *c < hi),
                )
                .collect();
            edges.sort_by(f64::total_cmp);
            let total: f64 = edges
                .windows(2)
                .map(|w| quadrature::integrate_fixed(rule, w[0], w[1], |xi| [at(xi) * normal::pdf(xi)])[0])
                .sum();
            let edge = (at(lo) * normal::pdf(lo)).abs().max((at(hi) * normal::pdf(hi)).abs());
            if edge > 1e-10 * total.abs() && edge > 1e-300 {
                return Err(Error::PayoffNotIntegrable);
            }
            total
        }
    };
    if !value.is_finite() {
        return Err(Error::PayoffNotIntegrable);
    }
    Ok(value)
}

/// Generic European payoff at `t = 0`:
/// `e^{−∫_0^T r} ∫ E[φ(S_T) | X = x] f_X(x) dx`.
pub fn price_generic_quadrature(
    params: &ModelParams,
    rates: &RatesCurve,
    payoff: &dyn Payoff,
    maturity: f64,
    quad: &QuadratureSettings,
) -> Result<f64> {
    price_generic_at(params, rates, payoff, maturity, quad, &MarketState::initial(params))
}

/// Generic European payoff at a later date.
pub fn price_generic_at(
    params: &ModelParams,
    rates: &RatesCurve,
    payoff: &dyn Payoff,
    maturity: f64,
    quad: &QuadratureSettings,
    state: &MarketState,
) -> Result<f64> {
    if !(maturity > state.t && maturity > params.tau) {
        return Err(Error::WindowTooShort { maturity, start: state.t.max(params.tau) });
    }
    let mix = fit(params, maturity, quad, state)?;
    let rate_integral = rates.integral(state.t, maturity)?;
    let kinks = payoff.breakpoints();
    let rule = match quad.inner {
        InnerRule::Composite { nodes } => quadrature::gauss_legendre(nodes),
        InnerRule::GaussHermite { nodes } => quadrature::gauss_hermite(nodes),
    };
    let failure = core::cell::RefCell::new(None);
    let (value, _) = mix.integrate(quad.rule, |x| {
        match conditional_expectation(payoff, state.spot, rate_integral, params.sigma_s, x, quad.inner, &rule, &kinks) {
            Ok(v) => [v, 1.0],
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                [0.0, 1.0]
            }
        }
    })?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(libm::exp(-rate_integral) * value[0])
}
