//! Monte Carlo pricing and change-of-measure diagnostics.
//!
//! Paths are processed in fixed blocks of [`BLOCK`] consecutive indices.
//! Each block accumulates its own Welford statistics and the blocks are
//! merged in index order, so estimates do not depend on the worker count.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{ModelParams, OptionSpec, RatesCurve};
use crate::pricing::Payoff;
use crate::simulation::{step_risk_premium, Measure, PathBuffers, PathBundle, PathSimulator, TimeGrid};
use crate::stats::{summarize, Accumulator};

/// Paths per reduction block.
pub const BLOCK: usize = 4096;
/// Smallest path count accepted by the estimators.
pub const MIN_PATHS: usize = 1000;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub seed: u64,
}

impl McEstimate {
    fn from_acc(acc: &Accumulator, seed: u64) -> Self {
        Self { mean: acc.mean(), std_error: acc.std_error(), n_paths: acc.count() as usize, seed }
    }

    /// `|self − other| <= k·sqrt(se₁² + se₂²) + allowance`.
    pub fn agrees_with(&self, other: &McEstimate, k: f64, allowance: f64) -> bool {
        let se = libm::sqrt(self.std_error * self.std_error + other.std_error * other.std_error);
        (self.mean - other.mean).abs() <= k * se + allowance
    }

    /// `|self − value| <= k·se + allowance`.
    pub fn covers(&self, value: f64, k: f64, allowance: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error + allowance
    }
}

fn check_paths(n_paths: usize) -> Result<()> {
    if n_paths < MIN_PATHS {
        return Err(Error::TooFewPaths { min: MIN_PATHS, got: n_paths });
    }
    Ok(())
}

/// Runs paths `0..n_paths` through `observe`, which writes `m` values per path.
fn accumulate<F>(sim: &PathSimulator, n_paths: usize, m: usize, observe: F) -> Vec<Accumulator>
where
    F: Fn(&PathBuffers, &mut [f64]) + Sync,
{
    let blocks = n_paths.div_ceil(BLOCK);
    let run = |b: usize| {
        let mut acc = vec![Accumulator::default(); m];
        let mut buf = PathBuffers::default();
        let mut values = vec![0.0; m];
        for i in b * BLOCK..((b + 1) * BLOCK).min(n_paths) {
            sim.fill(i as u64, &mut buf);
            observe(&buf, &mut values);
            for (a, v) in acc.iter_mut().zip(&values) {
                a.push(*v);
            }
        }
        acc
    };
    #[cfg(feature = "parallel")]
    let partial: Vec<Vec<Accumulator>> = {
        use rayon::prelude::*;
        (0..blocks).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partial: Vec<Vec<Accumulator>> = (0..blocks).map(run).collect();

    let mut total = vec![Accumulator::default(); m];
    for block in &partial {
        for (t, a) in total.iter_mut().zip(block) {
            t.merge(a);
        }
    }
    total
}

fn maturity_index(grid: &TimeGrid, maturity: f64) -> Result<usize> {
    grid.index_of(maturity).ok_or(Error::InvalidGrid("contract maturity is not a grid point"))
}

/// Prices several contracts from one set of minimal-martingale paths.
pub fn mc_price_many(
    params: &ModelParams,
    rates: &RatesCurve,
    specs: &[OptionSpec],
    n_paths: usize,
    seed: u64,
    grid: &TimeGrid,
) -> Result<Vec<McEstimate>> {
    check_paths(n_paths)?;
    let sim = PathSimulator::new(params, rates, grid, seed, Measure::MinimalMartingale)?;
    let mut legs = Vec::with_capacity(specs.len());
    for spec in specs {
        spec.check(params)?;
        legs.push((maturity_index(grid, spec.maturity)?, rates.discount_factor(0.0, spec.maturity)?));
    }
    let acc = accumulate(&sim, n_paths, specs.len(), |buf, out| {
        for ((spec, (k, disc)), o) in specs.iter().zip(&legs).zip(out.iter_mut()) {
            *o = disc * spec.payoff(libm::exp(buf.log_price[*k]));
        }
    });
    Ok(acc.iter().map(|a| McEstimate::from_acc(a, seed)).collect())
}

/// Discounted expected payoff under the minimal martingale measure.
pub fn mc_price(
    params: &ModelParams,
    rates: &RatesCurve,
    spec: &OptionSpec,
    n_paths: usize,
    seed: u64,
    grid: &TimeGrid,
) -> Result<McEstimate> {
    Ok(mc_price_many(params, rates, core::slice::from_ref(spec), n_paths, seed, grid)?.remove(0))
}

/// Monte Carlo price of an arbitrary payoff maturing at `maturity`.
pub fn mc_price_payoff(
    params: &ModelParams,
    rates: &RatesCurve,
    payoff: &dyn Payoff,
    maturity: f64,
    n_paths: usize,
    seed: u64,
    grid: &TimeGrid,
) -> Result<McEstimate> {
    check_paths(n_paths)?;
    let sim = PathSimulator::new(params, rates, grid, seed, Measure::MinimalMartingale)?;
    let k = maturity_index(grid, maturity)?;
    let disc = rates.discount_factor(0.0, maturity)?;
    let acc = accumulate(&sim, n_paths, 1, |buf, out| {
        out[0] = disc * payoff.value(libm::exp(buf.log_price[k]));
    });
    Ok(McEstimate::from_acc(&acc[0], seed))
}

/// Terminal value `L_T` of the minimal-martingale density along a physical path.
///
/// Per step, `log L` gains `−a_k ξ_k − a_k²/2` with
/// `a_k = (μ_S I_k − R_k)/(σ_S √I_k)`, `I_k` the step's integrated delayed
/// confidence, `R_k` the step's rate integral and `ξ_k = ΔW_k/√Δ_k`.
pub fn mmm_density_path(params: &ModelParams, rates: &RatesCurve, path: &PathBundle) -> Result<f64> {
    if params.rho != 0.0 {
        return Err(Error::MeasureRequiresZeroRho { rho: params.rho });
    }
    if path.measure != Measure::Physical {
        return Err(Error::PhysicalPathRequired);
    }
    let dw = path.seed.w_increments.as_ref().ok_or(Error::MissingIncrements)?;
    let times = path.grid.times();
    let mut log_l = 0.0;
    for (k, w) in times.windows(2).enumerate() {
        let info = (path.integrated[k + 1] - path.integrated[k]).max(0.0);
        let xi = dw[k] / libm::sqrt(w[1] - w[0]);
        let a = step_risk_premium(params.mu_s, params.sigma_s, info, libm::sqrt(info), rates.integral(w[0], w[1])?);
        log_l += -a * xi - 0.5 * a * a;
    }
    Ok(libm::exp(log_l))
}

/// Sample mean of `L_T` over physical paths.
pub fn density_mean(params: &ModelParams, rates: &RatesCurve, n_paths: usize, seed: u64, grid: &TimeGrid) -> Result<McEstimate> {
    check_paths(n_paths)?;
    if params.rho != 0.0 {
        return Err(Error::MeasureRequiresZeroRho { rho: params.rho });
    }
    let sim = PathSimulator::new(params, rates, grid, seed, Measure::Physical)?;
    let acc = accumulate(&sim, n_paths, 1, |buf, out| out[0] = libm::exp(buf.log_density));
    Ok(McEstimate::from_acc(&acc[0], seed))
}

/// Change-of-measure consistency on the grid `grid`: (A) the physical
/// estimate of `E[L_T · discounted payoff]` and (B) [`mc_price`].
pub fn reweighted_price_check_on(
    params: &ModelParams,
    rates: &RatesCurve,
    spec: &OptionSpec,
    n_paths: usize,
    seed: u64,
    grid: &TimeGrid,
) -> Result<(McEstimate, McEstimate)> {
    check_paths(n_paths)?;
    spec.check(params)?;
    if params.rho != 0.0 {
        return Err(Error::MeasureRequiresZeroRho { rho: params.rho });
    }
    let k = maturity_index(grid, spec.maturity)?;
    if k + 1 != grid.len() {
        return Err(Error::InvalidGrid("grid must end at the contract maturity"));
    }
    let disc = rates.discount_factor(0.0, spec.maturity)?;
    let sim = PathSimulator::new(params, rates, grid, seed, Measure::Physical)?;
    let acc = accumulate(&sim, n_paths, 1, |buf, out| {
        out[0] = libm::exp(buf.log_density) * disc * spec.payoff(libm::exp(buf.log_price[k]));
    });
    let weighted = McEstimate::from_acc(&acc[0], seed);
    let direct = mc_price(params, rates, spec, n_paths, seed, grid)?;
    Ok((weighted, direct))
}

/// [`reweighted_price_check_on`] with the default grid up to the contract maturity.
pub fn reweighted_price_check(
    params: &ModelParams,
    rates: &RatesCurve,
    spec: &OptionSpec,
    n_paths: usize,
    seed: u64,
) -> Result<(McEstimate, McEstimate)> {
    let grid = TimeGrid::default_for(params, spec.maturity)?;
    reweighted_price_check_on(params, rates, spec, n_paths, seed, &grid)
}

/// Sample moments of `X_t` and `log S_t` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub t: f64,
    pub mean_x: f64,
    pub mean_x_se: f64,
    pub var_x: f64,
    pub var_x_se: f64,
    pub mean_log_s: f64,
    pub mean_log_s_se: f64,
    pub var_log_s: f64,
    pub var_log_s_se: f64,
}

/// Physical-measure moments of `X_t` and `log S_t` at grid times `times`.
pub fn moment_estimates(
    params: &ModelParams,
    rates: &RatesCurve,
    grid: &TimeGrid,
    times: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<Vec<MomentEstimate>> {
    if n_paths < 2 {
        return Err(Error::TooFewPaths { min: 2, got: n_paths });
    }
    let idx = times
        .iter()
        .map(|&t| grid.index_of(t).ok_or(Error::TimeBeyondHorizon { t, horizon: grid.horizon() }))
        .collect::<Result<Vec<_>>>()?;
    let sim = PathSimulator::new(params, rates, grid, seed, Measure::Physical)?;
    let m = idx.len();
    let mut xs = vec![Vec::with_capacity(n_paths); m];
    let mut ls = vec![Vec::with_capacity(n_paths); m];
    let mut buf = PathBuffers::default();
    for i in 0..n_paths {
        sim.fill(i as u64, &mut buf);
        for (j, &k) in idx.iter().enumerate() {
            xs[j].push(buf.integrated[k]);
            ls[j].push(buf.log_price[k]);
        }
    }
    Ok(times
        .iter()
        .zip(xs.iter().zip(&ls))
        .map(|(&t, (x, l))| {
            let sx = summarize(x);
            let sl = summarize(l);
            MomentEstimate {
                t,
                mean_x: sx.mean,
                mean_x_se: sx.se_mean,
                var_x: sx.variance,
                var_x_se: sx.se_variance,
                mean_log_s: sl.mean,
                mean_log_s_se: sl.se_mean,
                var_log_s: sl.variance,
                var_log_s_se: sl.se_variance,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::simulate_paths;
    use crate::test_support::table1_params;

    const T: f64 = 63.0 / 252.0;

    fn daily() -> TimeGrid {
        TimeGrid::uniform(T, 1.0 / 252.0).unwrap()
    }

    #[test]
    fn rejects_small_runs() {
        let p = table1_params(100.0);
        let r = RatesCurve::flat(0.01);
        assert!(matches!(
            mc_price(&p, &r, &OptionSpec::call(450.0, T), 10, 1, &daily()),
            Err(Error::TooFewPaths { .. })
        ));
    }

    #[test]
    fn far_out_of_the_money_is_exactly_zero() {
        let p = table1_params(100.0);
        let est = mc_price(&p, &RatesCurve::flat(0.01), &OptionSpec::call(1e6, T), 5000, 2, &daily()).unwrap();
        assert_eq!((est.mean, est.std_error), (0.0, 0.0));
        let (a, b) = reweighted_price_check_on(&p, &RatesCurve::flat(0.01), &OptionSpec::call(1e6, T), 5000, 2, &daily()).unwrap();
        assert_eq!((a.mean, b.mean), (0.0, 0.0));
    }

    #[test]
    fn forward_is_martingale() {
        let p = table1_params(100.0);
        let est = mc_price_payoff(&p, &RatesCurve::flat(0.0), &crate::pricing::Forward, T, 20_000, 3, &daily()).unwrap();
        assert!(est.covers(450.0, 3.0, 0.0), "{est:?}");
    }

    #[test]
    fn block_reduction_is_thread_count_independent() {
        let p = table1_params(100.0);
        let r = RatesCurve::flat(0.01);
        let specs = [OptionSpec::call(450.0, T), OptionSpec::cash_or_nothing(450.0, T, 100.0)];
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| mc_price_many(&p, &r, &specs, 10_000, 5, &daily())).unwrap();
        let b = three.install(|| mc_price_many(&p, &r, &specs, 10_000, 5, &daily())).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn standard_error_scales_with_path_count() {
        let p = table1_params(100.0);
        let r = RatesCurve::flat(0.01);
        let spec = OptionSpec::call(450.0, T);
        let small = mc_price(&p, &r, &spec, 5000, 6, &daily()).unwrap();
        let large = mc_price(&p, &r, &spec, 20_000, 6, &daily()).unwrap();
        let ratio = small.std_error / large.std_error;
        assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
    }

    #[test]
    fn density_path_matches_streamed_value() {
        let p = table1_params(100.0);
        let r = RatesCurve::flat(0.02);
        let grid = daily();
        let sim = PathSimulator::new(&p, &r, &grid, 8, Measure::Physical).unwrap();
        let mut buf = PathBuffers::default();
        for i in 0..20 {
            sim.fill(i, &mut buf);
            let l = mmm_density_path(&p, &r, &sim.path(i)).unwrap();
            assert!(l > 0.0);
            assert!((libm::log(l) - buf.log_density).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_risk_premium_gives_unit_density() {
        let mut p = table1_params(100.0);
        p.confidence.sigma = 0.0;
        let horizon = p.tau;
        let r = RatesCurve::flat(p.mu_s * 100.0);
        let grid = TimeGrid::uniform(horizon, horizon / 10.0).unwrap();
        let paths = simulate_paths(&p, &r, &grid, 5, 4, Measure::Physical).unwrap();
        for path in &paths {
            let l = mmm_density_path(&p, &r, path).unwrap();
            assert!((l - 1.0).abs() < 1e-12, "{l}");
        }
    }

    #[test]
    fn density_preconditions() {
        let p = table1_params(100.0);
        let r = RatesCurve::flat(0.0);
        let grid = daily();
        let mmm = simulate_paths(&p, &r, &grid, 1, 4, Measure::MinimalMartingale).unwrap();
        assert!(matches!(mmm_density_path(&p, &r, &mmm[0]), Err(Error::PhysicalPathRequired)));
        let bare = PathSimulator::new(&p, &r, &grid, 4, Measure::Physical).unwrap().keep_increments(false).path(0);
        assert!(matches!(mmm_density_path(&p, &r, &bare), Err(Error::MissingIncrements)));
    }

    #[test]
    fn density_has_unit_mean() {
        let p = table1_params(100.0);
        let est = density_mean(&p, &RatesCurve::flat(0.01), 20_000, 12, &daily()).unwrap();
        assert!(est.covers(1.0, 3.0, 0.0), "{est:?}");
    }
}
