//! Closed-form moments of the integrated information process
//! `X_t = ∫_0^t P_{u-τ} du` and of `log S_t`.
//!
//! For `t <= τ` the process is deterministic, `X_t = ∫_{-τ}^{t-τ} φ(u) du`.
//! For `t > τ`, `X_t = X_τ + P̄_{0,t-τ}` with `P̄_{0,u} = ∫_0^u P_v dv` the
//! integral of a geometric Brownian motion started at `φ(0)`.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::quadrature;

/// Mean and variance of a scalar quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentPair {
    pub mean: f64,
    pub variance: f64,
}

/// `(e^{k u} − 1) / k`, continuous at `k = 0`.
fn growth(k: f64, u: f64) -> f64 {
    if k == 0.0 {
        u
    } else {
        libm::expm1(k * u) / k
    }
}

/// Mean and variance of `P̄_{0,u}` for a GBM with drift `mu`, volatility
/// `sigma`, started at `p_start`.
pub fn integrated_gbm_moments(p_start: f64, mu: f64, sigma: f64, u: f64) -> Result<MomentPair> {
    if u <= 0.0 {
        return Ok(MomentPair { mean: 0.0, variance: 0.0 });
    }
    let s2 = sigma * sigma;
    let b = mu + s2;
    let c = 2.0 * mu + s2;
    if mu == 0.0 {
        return Err(Error::DegenerateDenominator("mu_P = 0"));
    }
    if b == 0.0 {
        return Err(Error::DegenerateDenominator("mu_P + sigma_P^2 = 0"));
    }
    if c == 0.0 {
        return Err(Error::DegenerateDenominator("2 mu_P + sigma_P^2 = 0"));
    }
    let mean = p_start * growth(mu, u);
    let p2 = p_start * p_start;
    let t1 = 2.0 * p2 / (b * c) * libm::expm1(c * u);
    let t2 = 2.0 * p2 / (mu * b) * libm::expm1(mu * u);
    let t3 = mean * mean;
    let mut variance = t1 - t2 - t3;
    let scale = t1.abs().max(t2.abs()).max(t3);
    if !(variance > 1e-4 * scale) {
        variance = variance_by_quadrature(p_start, mu, s2, u);
    }
    Ok(MomentPair { mean, variance })
}

/// `2 p² ∫_0^u ∫_0^v e^{μ(v+w)} (e^{σ² w} − 1) dw dv`, the variance of
/// `P̄_{0,u}` written with a nonnegative integrand.
fn variance_by_quadrature(p_start: f64, mu: f64, s2: f64, u: f64) -> f64 {
    if s2 == 0.0 {
        return 0.0;
    }
    let rule = quadrature::gauss_legendre(32);
    let outer = quadrature::integrate_fixed(&rule, 0.0, u, |v| {
        let inner = quadrature::integrate_fixed(&rule, 0.0, 1.0, |y| {
            let w = v * y;
            [libm::exp(mu * w) * libm::expm1(s2 * w)]
        })[0];
        [libm::exp(mu * v) * v * inner]
    })[0];
    2.0 * p_start * p_start * outer
}

/// `E[X_t]`.
pub fn mean_x(params: &ModelParams, t: f64) -> Result<f64> {
    params.ensure_valid()?;
    if t <= params.tau {
        return Ok(params.deterministic_info(t.max(0.0)));
    }
    let c = &params.confidence;
    Ok(params.head() + c.p0() * growth(c.mu, t - params.tau))
}

/// `Var[X_t]`; zero on the deterministic window `t <= τ`.
pub fn var_x(params: &ModelParams, t: f64) -> Result<f64> {
    params.ensure_valid()?;
    if t <= params.tau {
        return Ok(0.0);
    }
    let c = &params.confidence;
    Ok(integrated_gbm_moments(c.p0(), c.mu, c.sigma, t - params.tau)?.variance)
}

/// `E[P_u P_v] = φ(0)² e^{μ(v−u)} e^{(2μ+σ²)u}` for `0 <= u <= v`, symmetric in `(u, v)`.
pub fn cross_moment_p(params: &ModelParams, u: f64, v: f64) -> f64 {
    let (u, v) = if u <= v { (u, v) } else { (v, u) };
    let c = &params.confidence;
    let p0 = c.p0();
    p0 * p0 * libm::exp(c.mu * (v - u) + (2.0 * c.mu + c.sigma * c.sigma) * u)
}

/// Mean and variance of `log S_t` under the physical measure.
pub fn moments_log_s(params: &ModelParams, t: f64) -> Result<MomentPair> {
    let mx = mean_x(params, t)?;
    let vx = var_x(params, t)?;
    let drift = params.mu_s - 0.5 * params.sigma_s * params.sigma_s;
    Ok(MomentPair {
        mean: libm::log(params.s0) + drift * mx,
        variance: drift * drift * vx + params.sigma_s * params.sigma_s * mx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::table1_params;

    const TAU: f64 = 5.0 / 252.0;

    #[test]
    fn deterministic_window() {
        let p = table1_params(100.0);
        for &t in &[0.0, 0.3 * TAU, TAU] {
            assert!((mean_x(&p, t).unwrap() - 100.0 * t).abs() < 1e-12);
            assert_eq!(var_x(&p, t).unwrap(), 0.0);
        }
        assert_eq!(mean_x(&p, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn mean_matches_closed_form_value() {
        let p = table1_params(100.0);
        let want = 100.0 * TAU + (100.0 / 0.03) * (libm::exp(0.03 * 58.0 / 252.0) - 1.0);
        let got = mean_x(&p, 63.0 / 252.0).unwrap();
        assert!((got - want).abs() < 1e-10 * want);
    }

    #[test]
    fn branch_continuity_at_delay() {
        let p = table1_params(100.0);
        let left = mean_x(&p, TAU).unwrap();
        let right = mean_x(&p, TAU * (1.0 + 1e-15)).unwrap();
        assert!((left - right).abs() <= 1e-12 * left);
        let v = var_x(&p, TAU * (1.0 + 1e-15)).unwrap();
        assert!(v.abs() <= 1e-12 * left * left);
    }

    #[test]
    fn zero_sigma_collapses_variance() {
        let mut p = table1_params(100.0);
        p.confidence.sigma = 0.0;
        for &t in &[0.05, 0.25, 1.0] {
            let m = mean_x(&p, t).unwrap();
            assert!(var_x(&p, t).unwrap().abs() <= 1e-10 * m * m);
        }
    }

    #[test]
    fn degenerate_denominators_are_errors() {
        let mut p = table1_params(100.0);
        p.confidence.mu = -0.35 * 0.35;
        assert!(matches!(var_x(&p, 0.25), Err(Error::DegenerateDenominator(_))));
        p.confidence.mu = -0.35 * 0.35 / 2.0;
        assert!(matches!(var_x(&p, 0.25), Err(Error::DegenerateDenominator(_))));
    }

    #[test]
    fn cross_moment_examples() {
        let p = table1_params(100.0);
        assert_eq!(cross_moment_p(&p, 0.0, 0.0), 1e4);
        let t = 0.2;
        let e_pt = 100.0 * libm::exp(0.03 * t);
        assert!((cross_moment_p(&p, 0.0, t) - 100.0 * e_pt).abs() < 1e-9);
        let e_p2 = 1e4 * libm::exp((0.06 + 0.35 * 0.35) * t);
        assert!((cross_moment_p(&p, t, t) - e_p2).abs() < 1e-9);
        assert_eq!(cross_moment_p(&p, 0.1, 0.2), cross_moment_p(&p, 0.2, 0.1));
    }

    /// Variance from `2∫_0^u∫_0^v E[P_w P_v] dw dv − E[P̄]²` by tensor Gauss–Legendre.
    fn variance_by_double_integral(p: &ModelParams, t: f64) -> f64 {
        let u = t - p.tau;
        let rule = quadrature::gauss_legendre(48);
        let second = quadrature::integrate_fixed(&rule, 0.0, u, |v| {
            [quadrature::integrate_fixed(&rule, 0.0, v, |w| [cross_moment_p(p, w, v)])[0]]
        })[0] * 2.0;
        let c = &p.confidence;
        let mean = quadrature::integrate_fixed(&rule, 0.0, u, |w| [c.p0() * libm::exp(c.mu * w)])[0];
        second - mean * mean
    }

    #[test]
    fn closed_form_variance_agrees_with_double_integral() {
        let p = table1_params(100.0);
        for &t in &[0.05, 0.1, 0.25, 1.0] {
            let closed = var_x(&p, t).unwrap();
            let direct = variance_by_double_integral(&p, t);
            assert!((closed - direct).abs() <= 1e-6 * closed, "t = {t}: {closed} vs {direct}");
        }
    }

    #[test]
    fn log_price_moments() {
        let p = table1_params(100.0);
        let m = moments_log_s(&p, 0.0).unwrap();
        assert_eq!(m.mean, libm::log(450.0));
        assert_eq!(m.variance, 0.0);
        let t = 0.5 * TAU;
        let m = moments_log_s(&p, t).unwrap();
        let drift = 1e-5 - 0.5 * 0.04 * 0.04;
        assert!((m.mean - (libm::log(450.0) + drift * 100.0 * t)).abs() < 1e-12);
        assert!((m.variance - 0.04 * 0.04 * 100.0 * t).abs() < 1e-14);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]
            #[test]
            fn variance_is_nonnegative(mu in -0.5..0.5f64, sigma in 1e-6..1.0f64, frac in 1e-6..1.0f64) {
                prop_assume!(mu != 0.0);
                let mut p = table1_params(100.0);
                p.confidence.mu = mu;
                p.confidence.sigma = sigma;
                let t = TAU + frac * (1.0 - TAU);
                match var_x(&p, t) {
                    Ok(v) => prop_assert!(v >= 0.0, "var = {v}"),
                    Err(Error::DegenerateDenominator(_)) => {}
                    Err(e) => return Err(TestCaseError::fail(alloc::format!("{e}"))),
                }
            }

            #[test]
            fn mean_is_increasing(t1 in 0.0..1.0f64, dt in 1e-6..1.0f64) {
                let p = table1_params(100.0);
                prop_assert!(mean_x(&p, t1 + dt).unwrap() > mean_x(&p, t1).unwrap());
            }
        }
    }
}
