//! Config-driven commands. Each returns the files it would write so callers
//! can inspect output without touching the filesystem.

use std::fs;
use std::path::{Path, PathBuf};

use confidence_core::mc;
use confidence_core::moments;
use confidence_core::pricing;
use confidence_core::simulation::{kde_density, Bandwidth, PathBuffers, PathSimulator, TimeGrid};
use confidence_core::stats::summarize;
use confidence_core::{ContractKind, OptionSpec};

use crate::config::Config;
use crate::csv::{fmt_g, fmt_opt, Csv};
use crate::error::CliError;
use crate::tables::{self, Table, TableOptions};

pub const PRICE_HEADER: &[&str] = &["kind", "K", "T", "tau", "P0", "price", "q1", "q2", "err_estimate"];
pub const PATH_HEADER: &[&str] = &["path_id", "t", "P", "S", "X"];
pub const DENSITY_HEADER: &[&str] = &["x", "f"];
pub const SCENARIO_HEADER: &[&str] =
    &["scenario", "P0", "tau", "rho", "n_paths", "seed", "mean_S_T", "sd_S_T", "bandwidth"];
pub const MOMENT_HEADER: &[&str] = &["t", "mean_X", "var_X", "mean_logS", "var_logS"];
pub const MOMENT_MC_HEADER: &[&str] = &[
    "mc_mean_X",
    "mc_mean_X_se",
    "mc_var_X",
    "mc_var_X_se",
    "mc_mean_logS",
    "mc_mean_logS_se",
    "mc_var_logS",
    "mc_var_logS_se",
];

const DEFAULT_SEED: u64 = 2024;

/// Named CSV files produced by a command.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Output {
    pub files: Vec<(String, Csv)>,
}

impl Output {
    fn single(name: &str, csv: Csv) -> Self {
        Self { files: vec![(name.to_string(), csv)] }
    }

    pub fn get(&self, name: &str) -> Option<&Csv> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    /// Writes every file under `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
        self.files
            .iter()
            .map(|(name, csv)| {
                let path = dir.join(name);
                csv.write(&path)?;
                Ok(path)
            })
            .collect()
    }
}

fn seed(cfg: &Config) -> Result<u64, CliError> {
    Ok(cfg.count("seed")?.unwrap_or(DEFAULT_SEED))
}

/// Quadrature prices for every combination of `P0`, `tau`, `T` and `K`.
pub fn price(cfg: &Config) -> Result<Output, CliError> {
    let sweep = cfg.model()?;
    let rho = cfg.single("rho", Some(sweep.rho.clone()))?.unwrap();
    let rates = cfg.rates()?;
    let quad = cfg.quadrature()?;
    let kind = cfg.kind()?;
    let strikes = cfg.numbers("K")?.ok_or_else(|| CliError::config("missing required key `K`"))?;
    let maturities = cfg.durations("T")?.ok_or_else(|| CliError::config("missing required key `T`"))?;
    let payout = cfg.number("A")?.unwrap_or(1.0);
    let mut csv = Csv::new(PRICE_HEADER);
    for &p0 in &sweep.p0 {
        for &tau in &sweep.tau {
            let params = sweep.params(p0, tau, rho)?;
            for &maturity in &maturities {
                for &strike in &strikes {
                    let spec = match kind {
                        ContractKind::VanillaCall => OptionSpec::call(strike, maturity),
                        ContractKind::VanillaPut => OptionSpec::put(strike, maturity),
                        ContractKind::CashOrNothingCall => OptionSpec::cash_or_nothing(strike, maturity, payout),
                    };
                    let r = pricing::price_option(&params, &rates, &spec, &quad)?;
                    csv.push(vec![
                        kind.as_str().to_string(),
                        fmt_g(strike),
                        fmt_g(maturity),
                        fmt_g(tau),
                        fmt_g(p0),
                        fmt_g(r.price),
                        fmt_opt(r.q1),
                        fmt_g(r.q2),
                        fmt_g(r.quadrature_error_estimate),
                    ]);
                }
            }
        }
    }
    Ok(Output::single("price.csv", csv))
}

/// One of the built-in tables, written as `table<which>.csv`.
pub fn table(which: u8, opts: &TableOptions) -> Result<Output, CliError> {
    let t = Table::builtin(which, opts.days)?;
    let cells = tables::compute(&t, opts)?;
    Ok(Output::single(&format!("table{which}.csv"), tables::render(&cells)))
}

/// Sample paths for every `(P0, tau, rho)` scenario, all driven by the same
/// seed, plus optional kernel density estimates of `S` at the horizon.
pub fn simulate(cfg: &Config) -> Result<Output, CliError> {
    let sweep = cfg.model()?;
    let rates = cfg.rates()?;
    let days = cfg.days();
    let horizon = cfg.duration("horizon")?.unwrap_or(1.0);
    let step = cfg.duration("step")?.unwrap_or(1.0 / days.per_year);
    let n_paths = cfg.count("n_paths")?.unwrap_or(1) as usize;
    if n_paths == 0 {
        return Err(CliError::config("`n_paths` must be at least 1"));
    }
    let export = (cfg.count("export_paths")?.unwrap_or(10) as usize).min(n_paths);
    let density = cfg.flag("density")?.unwrap_or(false);
    let bandwidth = match cfg.number("bandwidth")? {
        Some(h) => Bandwidth::Fixed(h),
        None => Bandwidth::Silverman,
    };
    let measure = cfg.measure()?;
    let seed = seed(cfg)?;
    if density && n_paths < 2 {
        return Err(confidence_core::Error::TooFewSamples(n_paths).into());
    }

    let grid = TimeGrid::uniform(horizon, step)?;
    let mut out = Output::default();
    let mut scenarios = Csv::new(SCENARIO_HEADER);
    let mut k = 0;
    for &p0 in &sweep.p0 {
        for &tau in &sweep.tau {
            for &rho in &sweep.rho {
                let params = sweep.params(p0, tau, rho)?;
                let sim = PathSimulator::new(&params, &rates, &grid, seed, measure)?;
                let mut paths = Csv::new(PATH_HEADER);
                let mut terminal = Vec::with_capacity(n_paths);
                let mut buf = PathBuffers::default();
                for i in 0..n_paths {
                    sim.fill(i as u64, &mut buf);
                    terminal.push(buf.terminal_price());
                    if i < export {
                        for (j, &t) in grid.times().iter().enumerate() {
                            let s = if j == 0 { params.s0 } else { buf.log_price[j].exp() };
                            paths.push(vec![
                                i.to_string(),
                                fmt_g(t),
                                fmt_g(buf.confidence[j]),
                                fmt_g(s),
                                fmt_g(buf.integrated[j]),
                            ]);
                        }
                    }
                }
                let stats = summarize(&terminal);
                let h = if density {
                    let curve = kde_density(&terminal, bandwidth)?;
                    let mut d = Csv::new(DENSITY_HEADER);
                    for (x, f) in curve.x.iter().zip(&curve.f) {
                        d.push(vec![fmt_g(*x), fmt_g(*f)]);
                    }
                    out.files.push((format!("density_{k}.csv"), d));
                    fmt_g(curve.bandwidth)
                } else {
                    String::new()
                };
                scenarios.push(vec![
                    k.to_string(),
                    fmt_g(p0),
                    fmt_g(tau),
                    fmt_g(rho),
                    n_paths.to_string(),
                    seed.to_string(),
                    fmt_g(stats.mean),
                    if n_paths > 1 { fmt_g(stats.variance.sqrt()) } else { String::new() },
                    h,
                ]);
                out.files.push((format!("paths_{k}.csv"), paths));
                k += 1;
            }
        }
    }
    out.files.insert(0, ("scenarios.csv".to_string(), scenarios));
    Ok(out)
}

/// Evaluation times: `n` equal steps on `[0, T]` plus `τ` itself.
pub fn moment_times(maturity: f64, tau: f64, n: usize) -> Vec<f64> {
    let mut times: Vec<f64> = (0..=n).map(|i| maturity * i as f64 / n as f64).collect();
    if tau < maturity {
        times.push(tau);
    }
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * maturity);
    times
}

/// Closed-form moments of `X_t` and `log S_t` on `[0, T]`, with Monte Carlo
/// columns when `mc_paths > 0`.
pub fn moments(cfg: &Config) -> Result<Output, CliError> {
    let params = cfg.model()?.only()?;
    let rates = cfg.rates()?;
    let maturity = cfg
        .single("T", cfg.durations("T")?)?
        .ok_or_else(|| CliError::config("missing required key `T`"))?;
    let n_times = cfg.count("n_times")?.unwrap_or(50) as usize;
    if n_times == 0 {
        return Err(CliError::config("`n_times` must be at least 1"));
    }
    let mc_paths = cfg.count("mc_paths")?.unwrap_or(0) as usize;
    let times = moment_times(maturity, params.tau, n_times);

    let mc_rows = if mc_paths > 0 {
        let step = cfg.duration("step")?.unwrap_or(confidence_core::simulation::DEFAULT_STEP);
        let fine = TimeGrid::uniform(maturity, step.min(params.tau))?;
        let mut all: Vec<f64> = fine.times().iter().chain(&times).copied().collect();
        all.sort_by(f64::total_cmp);
        all.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * maturity);
        let grid = TimeGrid::from_times(all)?;
        Some(mc::moment_estimates(&params, &rates, &grid, &times, mc_paths, seed(cfg)?)?)
    } else {
        None
    };

    let header: Vec<&str> = match mc_rows {
        Some(_) => MOMENT_HEADER.iter().chain(MOMENT_MC_HEADER).copied().collect(),
        None => MOMENT_HEADER.to_vec(),
    };
    let mut csv = Csv::new(&header);
    for (i, &t) in times.iter().enumerate() {
        let log_s = moments::moments_log_s(&params, t)?;
        let mut row = vec![
            fmt_g(t),
            fmt_g(moments::mean_x(&params, t)?),
            fmt_g(moments::var_x(&params, t)?),
            fmt_g(log_s.mean),
            fmt_g(log_s.variance),
        ];
        if let Some(est) = &mc_rows {
            let e = &est[i];
            row.extend(
                [
                    e.mean_x,
                    e.mean_x_se,
                    e.var_x,
                    e.var_x_se,
                    e.mean_log_s,
                    e.mean_log_s_se,
                    e.var_log_s,
                    e.var_log_s_se,
                ]
                .map(fmt_g),
            );
        }
        csv.push(row);
    }
    Ok(Output::single("moments.csv", csv))
}
