//! Path generation for the confidence index `P`, the price `S` and the
//! integrated information `X`.
//!
//! `P` is sampled exactly on the grid from its log-normal transition. Given
//! the `P` grid, `X` is the piecewise-linear integral of the delayed
//! confidence, and `log S` advances by conditionally Gaussian increments
//! with variance `σ_S² I_k`, `I_k = X_{k+1} − X_k`. When `ρ ≠ 0` the price
//! noise of step `k` is correlated with the confidence noise of the same step.

mod kde;

use alloc::sync::Arc;
use alloc::vec::Vec;

pub use kde::{kde_density, Bandwidth, DensityCurve};

use crate::error::{Error, Result};
use crate::model::{ModelParams, RatesCurve};
use crate::rng;

/// Default grid spacing: a tenth of a trading day in year units.
pub const DEFAULT_STEP: f64 = 1.0 / 2520.0;

/// Probability measure the paths are generated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Physical,
    /// Minimal martingale measure: the price drift is replaced by the short
    /// rate while the confidence dynamics are unchanged.
    MinimalMartingale,
}

/// Strictly increasing simulation times starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    /// Equally spaced grid on `[0, horizon]` with spacing at most `max_step`.
    pub fn uniform(horizon: f64, max_step: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidGrid("horizon must be positive and finite"));
        }
        if !(max_step > 0.0) {
            return Err(Error::InvalidGrid("step must be positive"));
        }
        let n = libm::ceil(horizon / max_step - 1e-9).max(1.0) as usize;
        let times = (0..=n).map(|i| horizon * i as f64 / n as f64).collect();
        Ok(Self { times })
    }

    /// Uniform grid with spacing `min(τ, 1/2520)`.
    pub fn default_for(params: &ModelParams, horizon: f64) -> Result<Self> {
        Self::uniform(horizon, params.tau.min(DEFAULT_STEP))
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times[0] != 0.0 {
            return Err(Error::InvalidGrid("grid must start at 0 and have at least two points"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || !times.iter().all(|t| t.is_finite()) {
            return Err(Error::InvalidGrid("grid times must be finite and strictly increasing"));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest spacing.
    pub fn step(&self) -> f64 {
        self.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Index of the grid point equal to `t` up to a relative `1e-9`.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-9 * self.horizon();
        let i = self.times.partition_point(|&s| s < t - tol);
        (i < self.times.len() && (self.times[i] - t).abs() <= tol).then_some(i)
    }
}

/// Reproduction record of one path.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedRecord {
    pub seed: u64,
    pub path_index: u64,
    /// Brownian increments `ΔW_k` driving the price over each step, under
    /// the measure the path was generated with.
    pub w_increments: Option<Vec<f64>>,
}

/// One simulated trajectory of `(P, S, X)` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBundle {
    pub grid: Arc<TimeGrid>,
    pub confidence: Vec<f64>,
    pub price: Vec<f64>,
    pub integrated: Vec<f64>,
    pub seed: SeedRecord,
    pub measure: Measure,
}

impl PathBundle {
    /// `X_t` at an arbitrary `t` in the simulated horizon.
    ///
    /// On `[0, τ]` this is the closed-form `∫_{-τ}^{t-τ} φ`; beyond it, the
    /// head plus the piecewise-linear integral of the simulated `P` over
    /// `[0, t − τ]`.
    pub fn integrated_info(&self, params: &ModelParams, t: f64) -> Result<f64> {
        integrated_info(params, &self.grid, &self.confidence, t)
    }
}

/// `X_t^τ` from a confidence path sampled on `grid`.
pub fn integrated_info(params: &ModelParams, grid: &TimeGrid, confidence: &[f64], t: f64) -> Result<f64> {
    let horizon = grid.horizon();
    if !(t >= 0.0) || t > horizon * (1.0 + 1e-12) {
        return Err(Error::TimeBeyondHorizon { t, horizon });
    }
    if t <= params.tau {
        return Ok(params.deterministic_info(t));
    }
    let (cell, theta) = locate(grid.times(), t - params.tau);
    let times = grid.times();
    let mut total = 0.0;
    for j in 0..cell {
        total += 0.5 * (times[j + 1] - times[j]) * (confidence[j] + confidence[j + 1]);
    }
    if theta > 0.0 {
        total += partial_trapezoid(times[cell + 1] - times[cell], theta, confidence[cell], confidence[cell + 1]);
    }
    Ok(params.head() + total)
}

/// Cell `j` and fraction `θ ∈ [0, 1)` with `s = t_j + θ (t_{j+1} − t_j)`;
/// fractions within `1e-9` of a node snap to it.
fn locate(times: &[f64], s: f64) -> (usize, f64) {
    let last = times.len() - 1;
    let mut j = times.partition_point(|&t| t <= s).saturating_sub(1).min(last);
    if j == last {
        return (last, 0.0);
    }
    let mut theta = (s - times[j]) / (times[j + 1] - times[j]);
    if theta < 1e-9 {
        theta = 0.0;
    } else if theta > 1.0 - 1e-9 {
        j += 1;
        theta = 0.0;
    }
    (j, theta)
}

/// `∫_{t_j}^{t_j + θh}` of the linear interpolant between `p0` and `p1`.
#[inline]
fn partial_trapezoid(h: f64, theta: f64, p0: f64, p1: f64) -> f64 {
    h * theta * (p0 + 0.5 * theta * (p1 - p0))
}

/// Market price of risk accumulated over one step,
/// `a_k = (μ_S I_k − R_k) / (σ_S √I_k)`, so that the step's contribution
/// to `log L` is `−a_k ξ_k − a_k²/2`.
#[inline]
pub(crate) fn step_risk_premium(mu_s: f64, sigma_s: f64, info: f64, sqrt_info: f64, rate_integral: f64) -> f64 {
    if info > 0.0 {
        (mu_s * info - rate_integral) / (sigma_s * sqrt_info)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy)]
enum DelayRef {
    Known(f64),
    Simulated { cell: usize, theta: f64 },
}

/// Reusable per-worker buffers.
#[derive(Debug, Clone, Default)]
pub struct PathBuffers {
    pub confidence: Vec<f64>,
    pub log_price: Vec<f64>,
    pub integrated: Vec<f64>,
    /// Standard normal draws of the price noise per step.
    pub price_shocks: Vec<f64>,
    /// `log L_T` of the minimal-martingale density along the path (only
    /// computed under the physical measure; meaningful when `ρ = 0`).
    pub log_density: f64,
    confidence_shocks: Vec<f64>,
    cumulative: Vec<f64>,
}

impl PathBuffers {
    pub fn terminal_price(&self) -> f64 {
        libm::exp(*self.log_price.last().unwrap())
    }

    pub fn terminal_info(&self) -> f64 {
        *self.integrated.last().unwrap()
    }
}

/// Precomputed simulation plan for one parameter set, rate curve and grid.
#[derive(Debug, Clone)]
pub struct PathSimulator {
    grid: Arc<TimeGrid>,
    seed: u64,
    measure: Measure,
    keep_increments: bool,
    p0: f64,
    s0: f64,
    log_s0: f64,
    mu_s: f64,
    sigma_s: f64,
    rho: f64,
    rho_perp: f64,
    dt: Vec<f64>,
    sqrt_dt: Vec<f64>,
    log_p_drift: Vec<f64>,
    log_p_vol: Vec<f64>,
    rate_integral: Vec<f64>,
    delay: Vec<DelayRef>,
    head: f64,
}

impl PathSimulator {
    pub fn new(params: &ModelParams, rates: &RatesCurve, grid: &TimeGrid, seed: u64, measure: Measure) -> Result<Self> {
        params.ensure_valid()?;
        let step = grid.step();
        if step > params.tau * (1.0 + 1e-12) {
            return Err(Error::GridTooCoarse { step, tau: params.tau });
        }
        if measure == Measure::MinimalMartingale && params.rho != 0.0 {
            return Err(Error::MeasureRequiresZeroRho { rho: params.rho });
        }
        let times = grid.times();
        let conf = &params.confidence;
        let dt: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
        let rate_integral = times
            .windows(2)
            .map(|w| rates.integral(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        let delay = times
            .iter()
            .map(|&t| {
                if t <= params.tau * (1.0 + 1e-12) {
                    DelayRef::Known(params.deterministic_info(t))
                } else {
                    let (cell, theta) = locate(times, t - params.tau);
                    DelayRef::Simulated { cell, theta }
                }
            })
            .collect();
        Ok(Self {
            grid: Arc::new(grid.clone()),
            seed,
            measure,
            keep_increments: true,
            p0: conf.p0(),
            s0: params.s0,
            log_s0: libm::log(params.s0),
            mu_s: params.mu_s,
            sigma_s: params.sigma_s,
            rho: params.rho,
            rho_perp: libm::sqrt(1.0 - params.rho * params.rho),
            sqrt_dt: dt.iter().map(|h| libm::sqrt(*h)).collect(),
            log_p_drift: dt.iter().map(|h| (conf.mu - 0.5 * conf.sigma * conf.sigma) * h).collect(),
            log_p_vol: dt.iter().map(|h| conf.sigma * libm::sqrt(*h)).collect(),
            dt,
            rate_integral,
            delay,
            head: params.head(),
        })
    }

    /// Whether [`PathBundle`]s carry their price increments (default `true`).
    pub fn keep_increments(mut self, keep: bool) -> Self {
        self.keep_increments = keep;
        self
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generates path `index` into `buf` without allocating once `buf` is warm.
    pub fn fill(&self, index: u64, buf: &mut PathBuffers) {
        let steps = self.dt.len();
        let mut rng = rng::substream(self.seed, index);
        for v in [
            &mut buf.confidence,
            &mut buf.cumulative,
            &mut buf.integrated,
            &mut buf.log_price,
        ] {
            v.resize(steps + 1, 0.0);
        }
        buf.confidence_shocks.resize(steps, 0.0);
        buf.price_shocks.resize(steps, 0.0);

        let conf = &mut buf.confidence[..];
        let cumulative = &mut buf.cumulative[..];
        let shocks = &mut buf.confidence_shocks[..];
        conf[0] = self.p0;
        cumulative[0] = 0.0;
        let mut p = self.p0;
        let mut cum = 0.0;
        for k in 0..steps {
            let z = rng::normal(&mut rng);
            shocks[k] = z;
            let next = p * libm::exp(self.log_p_drift[k] + self.log_p_vol[k] * z);
            cum += 0.5 * self.dt[k] * (p + next);
            conf[k + 1] = next;
            cumulative[k + 1] = cum;
            p = next;
        }

        for (x, d) in buf.integrated.iter_mut().zip(&self.delay) {
            *x = match *d {
                DelayRef::Known(x) => x,
                DelayRef::Simulated { cell, theta } => {
                    let mut x = self.head + cumulative[cell];
                    if theta > 0.0 {
                        x += partial_trapezoid(self.dt[cell], theta, conf[cell], conf[cell + 1]);
                    }
                    x
                }
            };
        }

        let integrated = &buf.integrated[..];
        let log_price = &mut buf.log_price[..];
        let price_shocks = &mut buf.price_shocks[..];
        let mut log_s = self.log_s0;
        let mut log_l = 0.0;
        log_price[0] = log_s;
        let half_var = 0.5 * self.sigma_s * self.sigma_s;
        let physical = self.measure == Measure::Physical;
        for k in 0..steps {
            let info = (integrated[k + 1] - integrated[k]).max(0.0);
            let sqrt_info = libm::sqrt(info);
            let mut w = rng::normal(&mut rng);
            if self.rho != 0.0 {
                w = self.rho * shocks[k] + self.rho_perp * w;
            }
            price_shocks[k] = w;
            if physical {
                log_s += (self.mu_s - half_var) * info + self.sigma_s * sqrt_info * w;
                let a = step_risk_premium(self.mu_s, self.sigma_s, info, sqrt_info, self.rate_integral[k]);
                log_l += -a * w - 0.5 * a * a;
            } else {
                log_s += self.rate_integral[k] - half_var * info + self.sigma_s * sqrt_info * w;
            }
            log_price[k + 1] = log_s;
        }
        buf.log_density = log_l;
    }

    /// Path `index` as an owned bundle.
    pub fn path(&self, index: u64) -> PathBundle {
        let mut buf = PathBuffers::default();
        self.fill(index, &mut buf);
        self.bundle(index, buf)
    }

    fn bundle(&self, index: u64, buf: PathBuffers) -> PathBundle {
        let w_increments = self.keep_increments.then(|| {
            buf.price_shocks.iter().zip(&self.sqrt_dt).map(|(w, s)| w * s).collect()
        });
        let mut price: Vec<f64> = buf.log_price.iter().map(|l| libm::exp(*l)).collect();
        price[0] = self.s0;
        PathBundle {
            grid: Arc::clone(&self.grid),
            price,
            confidence: buf.confidence,
            integrated: buf.integrated,
            seed: SeedRecord { seed: self.seed, path_index: index, w_increments },
            measure: self.measure,
        }
    }

    /// Paths `0..n`, in index order.
    pub fn paths(&self, n: usize) -> Vec<PathBundle> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..n as u64).into_par_iter().map(|i| self.path(i)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..n as u64).map(|i| self.path(i)).collect()
        }
    }
}

/// Simulates `n_paths` independent trajectories; path `i` uses substream `i` of `seed`.
pub fn simulate_paths(
    params: &ModelParams,
    rates: &RatesCurve,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
    measure: Measure,
) -> Result<Vec<PathBundle>> {
    Ok(PathSimulator::new(params, rates, grid, seed, measure)?.paths(n_paths))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments;
    use crate::stats::{summarize, Accumulator};
    use crate::test_support::table1_params;

    const T: f64 = 63.0 / 252.0;
    const TAU: f64 = 5.0 / 252.0;

    #[test]
    fn uniform_grid_hits_checkpoints() {
        let g = TimeGrid::uniform(T, DEFAULT_STEP).unwrap();
        assert_eq!(g.len(), 631);
        assert_eq!(g.times()[0], 0.0);
        assert_eq!(g.horizon(), T);
        assert_eq!(g.index_of(0.1), Some(252));
        assert_eq!(g.index_of(TAU), Some(50));
        assert_eq!(g.index_of(0.10003), None);
    }

    #[test]
    fn zero_noise_path_is_deterministic_closed_form() {
        let mut p = table1_params(100.0);
        p.confidence.sigma = 0.0;
        // σ_S = 0 is invalid, so check the drift part with a vanishing σ_S and compare log S / X.
        p.sigma_s = 1e-300;
        let grid = TimeGrid::uniform(T, DEFAULT_STEP).unwrap();
        let path = simulate_paths(&p, &RatesCurve::flat(0.0), &grid, 1, 9, Measure::Physical).unwrap().remove(0);
        let x_t = 100.0 * TAU + (100.0 / 0.03) * libm::expm1(0.03 * (T - TAU));
        let got_x = *path.integrated.last().unwrap();
        // trapezoid error of an exponential over 1/2520 steps
        assert!((got_x - x_t).abs() < 1e-8 * x_t, "{got_x} vs {x_t}");
        let s_t = *path.price.last().unwrap();
        assert!((s_t - 450.0 * libm::exp(1e-5 * got_x)).abs() < 1e-10);
    }

    #[test]
    fn bundle_invariants() {
        let p = table1_params(100.0);
        let grid = TimeGrid::uniform(T, 1.0 / 252.0).unwrap();
        let paths = simulate_paths(&p, &RatesCurve::flat(0.01), &grid, 20, 3, Measure::Physical).unwrap();
        for path in &paths {
            assert_eq!(path.confidence[0], 100.0);
            assert_eq!(path.price[0], 450.0);
            assert_eq!(path.integrated[0], 0.0);
            assert!(path.integrated.windows(2).all(|w| w[1] >= w[0]));
            assert!(path.confidence.iter().all(|v| *v > 0.0));
            assert_eq!(path.seed.w_increments.as_ref().unwrap().len(), grid.len() - 1);
        }
    }

    #[test]
    fn deterministic_window_is_identical_across_seeds() {
        let p = table1_params(100.0);
        let grid = TimeGrid::uniform(T, DEFAULT_STEP).unwrap();
        let k = grid.index_of(TAU).unwrap();
        let reference: Vec<f64> = simulate_paths(&p, &RatesCurve::flat(0.0), &grid, 1, 0, Measure::Physical).unwrap()[0]
            .integrated[..=k]
            .to_vec();
        for seed in 1..100 {
            let path = PathSimulator::new(&p, &RatesCurve::flat(0.0), &grid, seed, Measure::Physical).unwrap().path(0);
            assert_eq!(&path.integrated[..=k], &reference[..]);
        }
        assert!((reference[k] - 100.0 * TAU).abs() < 1e-12);
    }

    #[test]
    fn errors_for_coarse_grid_and_correlated_martingale_measure() {
        let mut p = table1_params(100.0);
        let coarse = TimeGrid::uniform(T, 2.0 * TAU).unwrap();
        assert!(matches!(
            PathSimulator::new(&p, &RatesCurve::flat(0.0), &coarse, 0, Measure::Physical),
            Err(Error::GridTooCoarse { .. })
        ));
        p.rho = 1.0;
        let grid = TimeGrid::uniform(T, TAU).unwrap();
        assert!(matches!(
            PathSimulator::new(&p, &RatesCurve::flat(0.0), &grid, 0, Measure::MinimalMartingale),
            Err(Error::MeasureRequiresZeroRho { .. })
        ));
        assert!(PathSimulator::new(&p, &RatesCurve::flat(0.0), &grid, 0, Measure::Physical).is_ok());
    }

    #[test]
    fn rates_must_cover_grid() {
        let p = table1_params(100.0);
        let grid = TimeGrid::uniform(T, TAU).unwrap();
        let short = RatesCurve::new(alloc::vec![(0.1, 0.01)]).unwrap();
        assert!(matches!(
            PathSimulator::new(&p, &short, &grid, 0, Measure::Physical),
            Err(Error::TimeOutOfRange { .. })
        ));
    }

    #[test]
    fn integrated_info_at_arbitrary_times() {
        let p = table1_params(100.0);
        let grid = TimeGrid::uniform(T, 1.0 / 252.0).unwrap();
        let path = PathSimulator::new(&p, &RatesCurve::flat(0.0), &grid, 5, Measure::Physical).unwrap().path(0);
        assert_eq!(path.integrated_info(&p, 0.0).unwrap(), 0.0);
        assert!((path.integrated_info(&p, 0.5 * TAU).unwrap() - 50.0 * TAU).abs() < 1e-12);
        for (k, &t) in grid.times().iter().enumerate() {
            let x = path.integrated_info(&p, t).unwrap();
            assert!((x - path.integrated[k]).abs() <= 1e-12 * x.max(1.0));
        }
        assert!(matches!(path.integrated_info(&p, 1.0), Err(Error::TimeBeyondHorizon { .. })));
    }

    /// Piecewise-linear integral of a 10×-finer path should agree with the
    /// coarse trapezoid when both see the same underlying GBM.
    #[test]
    fn integrated_info_converges_under_refinement() {
        let p = table1_params(100.0);
        let fine = TimeGrid::uniform(T, DEFAULT_STEP / 10.0).unwrap();
        let path = PathSimulator::new(&p, &RatesCurve::flat(0.0), &fine, 11, Measure::Physical).unwrap().path(0);
        // subsample every 10th point to the coarse grid
        let coarse = TimeGrid::uniform(T, DEFAULT_STEP).unwrap();
        let coarse_p: Vec<f64> = path.confidence.iter().step_by(10).copied().collect();
        assert_eq!(coarse_p.len(), coarse.len());
        let x_coarse = integrated_info(&p, &coarse, &coarse_p, T).unwrap();
        let x_fine = path.integrated_info(&p, T).unwrap();
        assert!((x_coarse - x_fine).abs() < 1e-4 * x_fine);
    }

    #[test]
    fn bit_identical_regardless_of_worker_count() {
        let p = table1_params(100.0);
        let grid = TimeGrid::uniform(T, 1.0 / 252.0).unwrap();
        let sim = PathSimulator::new(&p, &RatesCurve::flat(0.01), &grid, 77, Measure::Physical).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| sim.paths(64));
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| sim.paths(64));
        assert_eq!(one, four);
    }

    #[test]
    fn correlated_paths_share_the_confidence_path() {
        let mut p = table1_params(100.0);
        let grid = TimeGrid::uniform(1.0, 1.0 / 252.0).unwrap();
        let rates = RatesCurve::flat(0.0);
        let mut finals = Vec::new();
        for rho in [0.0, 0.5, 1.0] {
            p.rho = rho;
            let path = PathSimulator::new(&p, &rates, &grid, 2024, Measure::Physical).unwrap().path(0);
            finals.push(path);
        }
        assert_eq!(finals[0].confidence, finals[1].confidence);
        assert_eq!(finals[0].confidence, finals[2].confidence);
        assert_ne!(finals[0].price, finals[2].price);
    }

    #[test]
    fn conditional_log_normality_with_deterministic_confidence() {
        let mut p = table1_params(100.0);
        p.confidence.sigma = 0.0;
        let grid = TimeGrid::uniform(T, 1.0 / 252.0).unwrap();
        let paths = simulate_paths(&p, &RatesCurve::flat(0.0), &grid, 10_000, 8, Measure::Physical).unwrap();
        let logs: Vec<f64> = paths.iter().map(|b| libm::log(*b.price.last().unwrap())).collect();
        let s = summarize(&logs);
        let x_t = *paths[0].integrated.last().unwrap();
        let mean = libm::log(450.0) + (1e-5 - 0.5 * 0.04 * 0.04) * x_t;
        let var = 0.04 * 0.04 * x_t;
        assert!(s.skewness.abs() < 0.1 && s.excess_kurtosis.abs() < 0.2);
        assert!((s.mean - mean).abs() < 3.0 * s.se_mean);
        assert!((s.variance - var).abs() < 0.05 * var);
    }

    #[test]
    fn discounted_price_is_martingale_under_mmm() {
        let p = table1_params(100.0);
        let grid = TimeGrid::uniform(T, 1.0 / 252.0).unwrap();
        let sim = PathSimulator::new(&p, &RatesCurve::flat(0.0), &grid, 21, Measure::MinimalMartingale).unwrap();
        let mut acc = alloc::vec![Accumulator::default(); grid.len()];
        let mut buf = PathBuffers::default();
        for i in 0..20_000 {
            sim.fill(i, &mut buf);
            for (a, l) in acc.iter_mut().zip(&buf.log_price) {
                a.push(libm::exp(*l));
            }
        }
        for a in acc.iter().skip(1) {
            assert!((a.mean() - 450.0).abs() < 3.0 * a.std_error() + 1e-9);
        }
    }

    #[test]
    fn mean_of_simulated_x_matches_closed_form() {
        let p = table1_params(100.0);
        let grid = TimeGrid::uniform(T, 1.0 / 1260.0).unwrap();
        let sim = PathSimulator::new(&p, &RatesCurve::flat(0.0), &grid, 4, Measure::Physical).unwrap();
        let mut acc = Accumulator::default();
        let mut buf = PathBuffers::default();
        for i in 0..20_000 {
            sim.fill(i, &mut buf);
            acc.push(buf.terminal_info());
        }
        let want = moments::mean_x(&p, T).unwrap();
        assert!((acc.mean() - want).abs() < 3.0 * acc.std_error());
    }
}
