//! Built-in option price tables.
//!
//! Every table shares `S0 = 450`, `r = 0.01`, `μ_P = 0.03`, `σ_P = 0.35`,
//! `σ_S = 0.04`, `μ_S = 1e-5`, a constant history `φ ≡ P0` and strikes
//! `400..=500`. Tables 1 and 3 vary `P0` at `T = 3m`, `τ = 1w`; tables 2
//! and 4 vary `(T, τ)` at `P0 = 100`. Tables 1 and 2 price vanilla calls,
//! tables 3 and 4 cash-or-nothing calls paying `A = 100`.

use confidence_core::approx::HeadConvention;
use confidence_core::mc::{self, McEstimate};
use confidence_core::pricing::{self, QuadratureSettings};
use confidence_core::simulation::TimeGrid;
use confidence_core::{ConfidenceParams, ContractKind, ModelParams, OptionSpec, RatesCurve};

use crate::config::DayCount;
use crate::csv::{fmt_g, Csv};
use crate::error::CliError;

pub const STRIKES: [f64; 5] = [400.0, 425.0, 450.0, 475.0, 500.0];
pub const S0: f64 = 450.0;
pub const RATE: f64 = 0.01;
pub const MU_P: f64 = 0.03;
pub const SIGMA_P: f64 = 0.35;
pub const SIGMA_S: f64 = 0.04;
pub const MU_S: f64 = 1e-5;
pub const PAYOUT: f64 = 100.0;

pub const HEADER: &[&str] = &["row", "K", "reference", "quad", "abs_diff", "model_quad", "mc", "mc_se", "mc_diff"];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Span {
    Weeks(f64),
    Months(f64),
}

impl Span {
    fn years(self, days: DayCount) -> f64 {
        match self {
            Span::Weeks(n) => n * days.per_week / days.per_year,
            Span::Months(n) => n * days.per_month / days.per_year,
        }
    }
}

struct RowDef {
    label: &'static str,
    p0: f64,
    maturity: Span,
    tau: Span,
    reference: [f64; 5],
}

const fn row(label: &'static str, p0: f64, maturity: Span, tau: Span, reference: [f64; 5]) -> RowDef {
    RowDef { label, p0, maturity, tau, reference }
}

const M3: Span = Span::Months(3.0);
const M1: Span = Span::Months(1.0);
const W1: Span = Span::Weeks(1.0);
const W2: Span = Span::Weeks(2.0);

const TABLE1: [RowDef; 3] = [
    row("P0=10", 10.0, M3, W1, [51.24, 28.35, 11.46, 3.09, 0.54]),
    row("P0=100", 100.0, M3, W1, [64.12, 48.05, 34.94, 24.69, 16.97]),
    row("P0=1000", 1000.0, M3, W1, [128.68, 117.75, 107.77, 98.66, 90.35]),
];

const TABLE2: [RowDef; 4] = [
    row("T=1m tau=1w", 100.0, M1, W1, [52.85, 33.09, 18.27, 8.81, 3.71]),
    row("T=1m tau=2w", 100.0, M1, W2, [51.58, 30.62, 15.18, 6.13, 2.00]),
    row("T=3m tau=1w", 100.0, M3, W1, [64.12, 48.05, 34.94, 24.69, 16.97]),
    row("T=3m tau=2w", 100.0, M3, W2, [62.95, 46.65, 33.42, 23.18, 15.60]),
];

const TABLE3: [RowDef; 3] = [
    row("P0=10", 10.0, M3, W1, [97.17, 82.77, 50.31, 18.87, 4.24]),
    row("P0=100", 100.0, M3, W1, [70.07, 58.38, 46.58, 35.66, 26.27]),
    row("P0=1000", 1000.0, M3, W1, [45.70, 41.77, 38.14, 34.79, 31.72]),
];

const TABLE4: [RowDef; 4] = [
    row("T=1m tau=1w", 100.0, M1, W1, [86.93, 69.97, 48.27, 28.11, 13.83]),
    row("T=1m tau=2w", 100.0, M1, W2, [91.50, 74.23, 48.69, 24.84, 9.80]),
    row("T=3m tau=1w", 100.0, M3, W1, [70.07, 58.38, 46.58, 35.66, 26.27]),
    row("T=3m tau=2w", 100.0, M3, W2, [71.21, 59.10, 46.77, 35.36, 25.62]),
];

/// One row of a table with its durations resolved in years.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: &'static str,
    pub p0: f64,
    pub maturity: f64,
    pub tau: f64,
    pub reference: [f64; 5],
}

impl TableRow {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            confidence: ConfidenceParams::constant(MU_P, SIGMA_P, 2.0 * self.tau, self.p0),
            mu_s: MU_S,
            sigma_s: SIGMA_S,
            tau: self.tau,
            rho: 0.0,
            s0: S0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub which: u8,
    pub kind: ContractKind,
    pub rows: Vec<TableRow>,
}

impl Table {
    pub fn builtin(which: u8, days: DayCount) -> Result<Self, CliError> {
        let (kind, defs): (_, &[RowDef]) = match which {
            1 => (ContractKind::VanillaCall, &TABLE1),
            2 => (ContractKind::VanillaCall, &TABLE2),
            3 => (ContractKind::CashOrNothingCall, &TABLE3),
            4 => (ContractKind::CashOrNothingCall, &TABLE4),
            _ => return Err(CliError::config(format!("unknown table {which}; expected 1, 2, 3 or 4"))),
        };
        let rows = defs
            .iter()
            .map(|d| TableRow {
                label: d.label,
                p0: d.p0,
                maturity: d.maturity.years(days),
                tau: d.tau.years(days),
                reference: d.reference,
            })
            .collect();
        Ok(Self { which, kind, rows })
    }

    pub fn spec(&self, strike: f64, maturity: f64) -> OptionSpec {
        match self.kind {
            ContractKind::CashOrNothingCall => OptionSpec::cash_or_nothing(strike, maturity, PAYOUT),
            ContractKind::VanillaPut => OptionSpec::put(strike, maturity),
            ContractKind::VanillaCall => OptionSpec::call(strike, maturity),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableOptions {
    /// Paths for the Monte Carlo column; `0` leaves it empty.
    pub mc_paths: usize,
    pub seed: u64,
    /// Head convention of the `quad` column compared against the reference.
    pub head: HeadConvention,
    /// Simulation step; defaults to one trading day.
    pub step: Option<f64>,
    pub days: DayCount,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self { mc_paths: 100_000, seed: 2024, head: HeadConvention::Dropped, step: None, days: DayCount::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableCell {
    pub row: &'static str,
    pub strike: f64,
    pub reference: f64,
    /// Quadrature price with the requested head convention.
    pub quad: f64,
    /// Quadrature price with the shifted head, the law the simulation follows.
    pub model_quad: f64,
    pub mc: Option<McEstimate>,
}

impl TableCell {
    pub fn abs_diff(&self) -> f64 {
        (self.quad - self.reference).abs()
    }

    pub fn mc_diff(&self) -> Option<f64> {
        self.mc.map(|m| (m.mean - self.model_quad).abs())
    }
}

pub fn compute(table: &Table, opts: &TableOptions) -> Result<Vec<TableCell>, CliError> {
    let rates = RatesCurve::flat(RATE);
    let quad = QuadratureSettings::default().with_head(opts.head);
    let model_quad = QuadratureSettings::default().with_head(HeadConvention::Shifted);
    let step = opts.step.unwrap_or(1.0 / opts.days.per_year);
    let mut cells = Vec::with_capacity(table.rows.len() * STRIKES.len());
    for (r, row) in table.rows.iter().enumerate() {
        let params = row.params();
        let specs: Vec<OptionSpec> = STRIKES.iter().map(|&k| table.spec(k, row.maturity)).collect();
        let mc = if opts.mc_paths > 0 {
            let grid = TimeGrid::uniform(row.maturity, step.min(row.tau))?;
            let seed = opts.seed.wrapping_add(r as u64);
            mc::mc_price_many(&params, &rates, &specs, opts.mc_paths, seed, &grid)?.into_iter().map(Some).collect()
        } else {
            vec![None; specs.len()]
        };
        for ((spec, reference), mc) in specs.iter().zip(row.reference).zip(mc) {
            let q = pricing::price_option(&params, &rates, spec, &quad)?.price;
            let m = if opts.head == HeadConvention::Shifted {
                q
            } else {
                pricing::price_option(&params, &rates, spec, &model_quad)?.price
            };
            cells.push(TableCell { row: row.label, strike: spec.strike, reference, quad: q, model_quad: m, mc });
        }
    }
    Ok(cells)
}

pub fn render(cells: &[TableCell]) -> Csv {
    let mut csv = Csv::new(HEADER);
    for c in cells {
        let (mc, se, diff) = match c.mc {
            Some(m) => (fmt_g(m.mean), fmt_g(m.std_error), fmt_g(c.mc_diff().unwrap())),
            None => (String::new(), String::new(), String::new()),
        };
        csv.push(vec![
            c.row.to_string(),
            fmt_g(c.strike),
            fmt_g(c.reference),
            fmt_g(c.quad),
            fmt_g(c.abs_diff()),
            fmt_g(c.model_quad),
            mc,
            se,
            diff,
        ]);
    }
    csv
}
