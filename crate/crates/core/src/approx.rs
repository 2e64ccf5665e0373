//! Moment-matched log-normal approximation of the integrated information.
//!
//! The time average `P̄_{0,u}/u` of the confidence GBM is replaced by a
//! log-normal variable with the same first two moments:
//!
//! ```text
//! ν²(u) = log(E[P̄²] / E[P̄]²),   α(u) = log(E[P̄] / u) − ν²/2
//! ```
//!
//! so that `X_{0,T} ≈ shift + u·exp(α + ν ξ)` with `u = T − τ` and `ξ`
//! standard normal.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::moments::integrated_gbm_moments;
use crate::rng;

/// How the deterministic head `X_τ^τ = ∫_{-τ}^0 φ` enters the approximated law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeadConvention {
    /// `X = X_τ^τ + P̄_{0,T−τ}`: the head is added as a deterministic shift.
    #[default]
    Shifted,
    /// `X ≈ P̄_{0,T−τ}`: the head is ignored. This is the convention under
    /// which the reference option tables were computed.
    Dropped,
}

/// Fitted shifted log-normal law of the integrated information over a pricing window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalApprox {
    /// Log-scale location of the time-averaged confidence.
    pub alpha: f64,
    /// Log-scale variance (`≥ 0`).
    pub nu2: f64,
    /// Length `u` of the stochastic part of the window.
    pub window: f64,
    /// Deterministic part added to every draw.
    pub shift: f64,
    /// `E[P̄]` over the stochastic window, kept for diagnostics.
    pub mean_integral: f64,
    pub maturity: f64,
    pub tau: f64,
}

/// Fits the shifted approximation for `X_{0,T}`.
pub fn fit_lognormal(params: &ModelParams, maturity: f64) -> Result<LogNormalApprox> {
    fit_lognormal_with(params, maturity, HeadConvention::Shifted)
}

/// Fits the approximation for `X_{0,T}` under the given head convention.
pub fn fit_lognormal_with(params: &ModelParams, maturity: f64, head: HeadConvention) -> Result<LogNormalApprox> {
    fit_lognormal_window(params, 0.0, maturity, None, head)
}

/// Fits the approximation for `X_{t,T} = ∫_t^T P_{u−τ} du` given the
/// information available at `t`.
///
/// For `t >= τ` the delayed confidence `P_{t−τ}` must be supplied; the
/// stochastic window then restarts from it. For `t < τ` the remaining
/// history `∫_{t−τ}^0 φ` is the deterministic head.
pub fn fit_lognormal_window(
    params: &ModelParams,
    t: f64,
    maturity: f64,
    delayed_confidence: Option<f64>,
    head: HeadConvention,
) -> Result<LogNormalApprox> {
    params.ensure_valid()?;
    let tau = params.tau;
    let start = t.max(tau);
    if !(maturity > start) {
        return Err(Error::WindowTooShort { maturity, start });
    }
    let u = maturity - start;
    let conf = &params.confidence;
    let (p_start, known) = if t < tau {
        (conf.p0(), conf.phi_integral(t - tau, 0.0))
    } else {
        let p = delayed_confidence.ok_or(Error::NonPositiveArgument("delayed_confidence"))?;
        if !(p > 0.0) {
            return Err(Error::NonPositiveArgument("delayed_confidence"));
        }
        (p, 0.0)
    };
    let m = integrated_gbm_moments(p_start, conf.mu, conf.sigma, u)?;
    let nu2 = if conf.sigma == 0.0 { 0.0 } else { libm::log1p(m.variance / (m.mean * m.mean)).max(0.0) };
    let alpha = libm::log(m.mean / u) - 0.5 * nu2;
    let shift = match head {
        HeadConvention::Shifted => known,
        HeadConvention::Dropped => 0.0,
    };
    Ok(LogNormalApprox { alpha, nu2, window: u, shift, mean_integral: m.mean, maturity, tau })
}

impl LogNormalApprox {
    pub fn nu(&self) -> f64 {
        libm::sqrt(self.nu2)
    }

    /// `X` at standardized log-coordinate `z`: `shift + u·exp(α + ν z)`.
    #[inline]
    pub fn x_at(&self, z: f64) -> f64 {
        self.shift + self.window * libm::exp(self.alpha + self.nu() * z)
    }

    /// Mean of the approximated law.
    pub fn mean(&self) -> f64 {
        self.shift + self.window * libm::exp(self.alpha + 0.5 * self.nu2)
    }

    /// Second moment of the time-averaged integral, `E[(P̄/u)²] = e^{2α + 2ν²}`.
    pub fn second_moment_average(&self) -> f64 {
        libm::exp(2.0 * self.alpha + 2.0 * self.nu2)
    }

    /// Density of the approximated `X` at `x`; zero at or below the shift.
    ///
    /// Degenerate fits (`ν² = 0`) have no density and return 0 everywhere.
    pub fn pdf(&self, x: f64) -> f64 {
        let y = (x - self.shift) / self.window;
        if !(y > 0.0) || self.nu2 == 0.0 {
            return 0.0;
        }
        let d = libm::log(y) - self.alpha;
        libm::exp(-0.5 * d * d / self.nu2) / (y * libm::sqrt(2.0 * core::f64::consts::PI * self.nu2)) / self.window
    }

    /// Upper end of the diagnostic domain, `shift + u·e^{α + 8ν}`.
    pub fn upper_bound(&self) -> f64 {
        self.x_at(8.0)
    }

    /// `n` i.i.d. draws, deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rng::substream(seed, 0);
        (0..n).map(|_| self.x_at(rng::normal(&mut rng))).collect()
    }
}

/// Density of the approximated `X` at `x`.
pub fn pdf_x(approx: &LogNormalApprox, x: f64) -> f64 {
    approx.pdf(x)
}

/// Draws `n` values of the approximated `X`.
pub fn sample_x(approx: &LogNormalApprox, n: usize, seed: u64) -> Vec<f64> {
    approx.sample(n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{mean_x, var_x};
    use crate::quadrature::{adaptive_simpson_scalar, AdaptiveOptions};
    use crate::test_support::table1_params;

    const T: f64 = 63.0 / 252.0;
    const TAU: f64 = 5.0 / 252.0;

    #[test]
    fn zero_volatility_collapses() {
        let mut p = table1_params(100.0);
        p.confidence.sigma = 0.0;
        let a = fit_lognormal(&p, T).unwrap();
        let u = T - TAU;
        assert_eq!(a.nu2, 0.0);
        let want = libm::log(100.0 * libm::expm1(0.03 * u) / (0.03 * u));
        assert!((a.alpha - want).abs() < 1e-14);
        let draws = a.sample(10, 1);
        assert!(draws.iter().all(|&x| x == 100.0 * TAU + u * libm::exp(a.alpha)));
    }

    #[test]
    fn moment_matching_identities() {
        let p = table1_params(100.0);
        let a = fit_lognormal(&p, T).unwrap();
        let u = T - TAU;
        let mean_bar = mean_x(&p, T).unwrap() - p.head();
        let second_bar = var_x(&p, T).unwrap() + mean_bar * mean_bar;
        assert!((libm::exp(a.alpha + 0.5 * a.nu2) * u - mean_bar).abs() <= 1e-10 * mean_bar);
        let second = a.second_moment_average() * u * u;
        assert!((second - second_bar).abs() <= 1e-10 * second_bar);
        assert!((a.mean() - mean_x(&p, T).unwrap()).abs() <= 1e-10 * a.mean());
    }

    #[test]
    fn pdf_vanishes_below_shift_and_normalizes() {
        let p = table1_params(100.0);
        let a = fit_lognormal(&p, T).unwrap();
        assert_eq!(a.shift, p.head());
        assert_eq!(a.pdf(a.shift), 0.0);
        assert_eq!(a.pdf(a.shift - 1.0), 0.0);
        let opts = AdaptiveOptions { rel_tol: 1e-12, abs_tol: 1e-16, max_depth: 50, initial_panels: 64 };
        let mass = adaptive_simpson_scalar(|x| a.pdf(x), a.shift, a.upper_bound(), &opts);
        assert!((mass.value[0] - 1.0).abs() < 1e-8, "mass {}", mass.value[0]);
        let first = adaptive_simpson_scalar(|x| x * a.pdf(x), a.shift, a.upper_bound(), &opts);
        let want = mean_x(&p, T).unwrap();
        assert!((first.value[0] - want).abs() < 1e-6 * want);
    }

    #[test]
    fn dropped_head_has_no_shift() {
        let p = table1_params(100.0);
        let a = fit_lognormal_with(&p, T, HeadConvention::Dropped).unwrap();
        let b = fit_lognormal(&p, T).unwrap();
        assert_eq!(a.shift, 0.0);
        assert_eq!((a.alpha, a.nu2), (b.alpha, b.nu2));
    }

    #[test]
    fn window_must_extend_past_delay() {
        let p = table1_params(100.0);
        assert!(matches!(fit_lognormal(&p, TAU), Err(Error::WindowTooShort { .. })));
    }

    #[test]
    fn later_windows_restart_from_observed_confidence() {
        let p = table1_params(100.0);
        let a = fit_lognormal_window(&p, 0.1, T, Some(120.0), HeadConvention::Shifted).unwrap();
        assert_eq!(a.window, T - 0.1);
        assert_eq!(a.shift, 0.0);
        assert!((a.mean_integral - 120.0 * libm::expm1(0.03 * (T - 0.1)) / 0.03).abs() < 1e-10);
        assert!(fit_lognormal_window(&p, 0.1, T, None, HeadConvention::Shifted).is_err());
        let early = fit_lognormal_window(&p, 0.5 * TAU, T, None, HeadConvention::Shifted).unwrap();
        assert!((early.shift - 100.0 * 0.5 * TAU).abs() < 1e-12);
        assert_eq!(early.window, T - TAU);
    }

    #[test]
    fn samples_are_deterministic_and_match_mean() {
        let p = table1_params(100.0);
        let a = fit_lognormal(&p, T).unwrap();
        let x = a.sample(100_000, 42);
        assert_eq!(x, a.sample(100_000, 42));
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        let se = libm::sqrt(var / n);
        assert!((mean - mean_x(&p, T).unwrap()).abs() < 3.0 * se);
    }
}
