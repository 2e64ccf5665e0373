//! `key = value` run configuration files.
//!
//! One assignment per line; `#` starts a comment. Keys are case-sensitive
//! and unknown keys are rejected. Some keys accept comma-separated lists.
//! Durations are either plain numbers in years or carry a unit suffix:
//! `d` (trading days), `w` (weeks), `m` (months), `y` (years).

use std::collections::BTreeMap;
use std::path::Path;

use confidence_core::approx::HeadConvention;
use confidence_core::pricing::{OuterRule, QuadratureSettings};
use confidence_core::simulation::Measure;
use confidence_core::{ConfidenceParams, ContractKind, ModelParams, RatesCurve};

use crate::error::CliError;

/// Every accepted key.
pub const KEYS: &[&str] = &[
    "mu_S",
    "sigma_S",
    "mu_P",
    "sigma_P",
    "rho",
    "tau",
    "L",
    "P0",
    "s0",
    "r",
    "T",
    "K",
    "A",
    "kind",
    "n_paths",
    "seed",
    "step",
    "horizon",
    "quadrature",
    "nodes",
    "rel_tol",
    "head",
    "density",
    "bandwidth",
    "export_paths",
    "measure",
    "n_times",
    "mc_paths",
    "days_per_year",
    "days_per_week",
    "days_per_month",
];

/// Trading-day conventions used to convert durations to years.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DayCount {
    pub per_year: f64,
    pub per_week: f64,
    pub per_month: f64,
}

impl Default for DayCount {
    fn default() -> Self {
        Self { per_year: 252.0, per_week: 5.0, per_month: 21.0 }
    }
}

impl DayCount {
    /// Parses `5d`, `1w`, `3m`, `1y` or a plain number of years.
    pub fn parse(&self, s: &str) -> Option<f64> {
        let s = s.trim();
        let (num, unit) = match s.char_indices().last()? {
            (i, c) if c.is_ascii_alphabetic() => (&s[..i], Some(c)),
            _ => (s, None),
        };
        let v: f64 = num.trim().parse().ok()?;
        if !v.is_finite() {
            return None;
        }
        let years = match unit {
            None | Some('y') => v,
            Some('d') => v / self.per_year,
            Some('w') => v * self.per_week / self.per_year,
            Some('m') => v * self.per_month / self.per_year,
            Some(_) => return None,
        };
        Some(years)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed configuration with typed accessors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
    days: DayCount,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::at_line(line, format!("expected `key = value`, found `{content}`")))?;
            let key = key.trim();
            let value = value.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::at_line(line, format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(CliError::at_line(line, format!("missing value for `{key}`")));
            }
            if let Some(prev) = entries.insert(key.to_string(), Entry { value: value.to_string(), line }) {
                return Err(CliError::at_line(line, format!("duplicate key `{key}` (first set at line {})", prev.line)));
            }
        }
        let mut cfg = Self { entries, days: DayCount::default() };
        cfg.days = DayCount {
            per_year: cfg.positive("days_per_year")?.unwrap_or(252.0),
            per_week: cfg.positive("days_per_week")?.unwrap_or(5.0),
            per_month: cfg.positive("days_per_month")?.unwrap_or(21.0),
        };
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn days(&self) -> DayCount {
        self.days
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn missing(key: &str) -> CliError {
        CliError::config(format!("missing required key `{key}`"))
    }

    fn bad(e: &Entry, key: &str, what: &str) -> CliError {
        CliError::at_line(e.line, format!("invalid {what} `{}` for `{key}`", e.value))
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.entry(key)
            .map(|e| e.value.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Self::bad(e, key, "number")))
            .transpose()
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.number(key)? {
            Some(v) if v <= 0.0 => Err(Self::bad(self.entry(key).unwrap(), key, "positive number")),
            v => Ok(v),
        }
    }

    pub fn require_number(&self, key: &str) -> Result<f64, CliError> {
        self.number(key)?.ok_or_else(|| Self::missing(key))
    }

    pub fn numbers(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.entry(key)
            .map(|e| {
                e.value
                    .split(',')
                    .map(|s| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Self::bad(e, key, "number list"))
            })
            .transpose()
    }

    pub fn duration(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.entry(key)
            .map(|e| self.days.parse(&e.value).ok_or_else(|| Self::bad(e, key, "duration")))
            .transpose()
    }

    pub fn durations(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.entry(key)
            .map(|e| {
                e.value
                    .split(',')
                    .map(|s| self.days.parse(s))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Self::bad(e, key, "duration list"))
            })
            .transpose()
    }

    pub fn count(&self, key: &str) -> Result<Option<u64>, CliError> {
        self.entry(key).map(|e| e.value.parse::<u64>().map_err(|_| Self::bad(e, key, "count"))).transpose()
    }

    pub fn word(&self, key: &str) -> Option<&str> {
        self.entry(key).map(|e| e.value.as_str())
    }

    pub fn flag(&self, key: &str) -> Result<Option<bool>, CliError> {
        self.entry(key)
            .map(|e| match e.value.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(Self::bad(e, key, "boolean")),
            })
            .transpose()
    }

    /// Exactly one value for a key that otherwise accepts lists.
    pub fn single(&self, key: &str, values: Option<Vec<f64>>) -> Result<Option<f64>, CliError> {
        match values {
            Some(v) if v.len() == 1 => Ok(Some(v[0])),
            Some(_) => Err(CliError::at_line(self.entry(key).unwrap().line, format!("`{key}` takes a single value here"))),
            None => Ok(None),
        }
    }

    /// Model parameter sweep: the cartesian product of the `P0`, `tau` and `rho` lists.
    pub fn model(&self) -> Result<ModelSweep, CliError> {
        let taus = self.durations("tau")?.ok_or_else(|| Self::missing("tau"))?;
        let max_tau = taus.iter().cloned().fold(0.0, f64::max);
        Ok(ModelSweep {
            mu_s: self.number("mu_S")?.unwrap_or(1e-5),
            sigma_s: self.require_number("sigma_S")?,
            mu_p: self.require_number("mu_P")?,
            sigma_p: self.require_number("sigma_P")?,
            rho: self.numbers("rho")?.unwrap_or_else(|| vec![0.0]),
            tau: taus,
            history: self.duration("L")?.unwrap_or(2.0 * max_tau),
            p0: self.numbers("P0")?.ok_or_else(|| Self::missing("P0"))?,
            s0: self.require_number("s0")?,
        })
    }

    /// Flat `r = 0.01` or piecewise `r = 0.5:0.01, 1:0.02` (segment end : rate).
    pub fn rates(&self) -> Result<RatesCurve, CliError> {
        let Some(e) = self.entry("r") else {
            return Ok(RatesCurve::flat(0.0));
        };
        if !e.value.contains(':') {
            let r = self.number("r")?.unwrap();
            return Ok(RatesCurve::flat(r));
        }
        let segments = e
            .value
            .split(',')
            .map(|seg| {
                let (end, rate) = seg.split_once(':')?;
                Some((self.days.parse(end)?, rate.trim().parse::<f64>().ok()?))
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Self::bad(e, "r", "rate curve"))?;
        RatesCurve::new(segments).map_err(|err| CliError::at_line(e.line, err.to_string()))
    }

    pub fn kind(&self) -> Result<ContractKind, CliError> {
        match self.word("kind") {
            None | Some("call") | Some("vanilla_call") => Ok(ContractKind::VanillaCall),
            Some("put") | Some("vanilla_put") => Ok(ContractKind::VanillaPut),
            Some("binary") | Some("cash_or_nothing") | Some("cash_or_nothing_call") => Ok(ContractKind::CashOrNothingCall),
            Some(_) => Err(Self::bad(self.entry("kind").unwrap(), "kind", "contract kind")),
        }
    }

    pub fn head(&self) -> Result<HeadConvention, CliError> {
        match self.word("head") {
            None | Some("shifted") => Ok(HeadConvention::Shifted),
            Some("dropped") => Ok(HeadConvention::Dropped),
            Some(_) => Err(Self::bad(self.entry("head").unwrap(), "head", "head convention")),
        }
    }

    pub fn measure(&self) -> Result<Measure, CliError> {
        match self.word("measure") {
            None | Some("physical") => Ok(Measure::Physical),
            Some("martingale") | Some("minimal_martingale") => Ok(Measure::MinimalMartingale),
            Some(_) => Err(Self::bad(self.entry("measure").unwrap(), "measure", "measure")),
        }
    }

    pub fn quadrature(&self) -> Result<QuadratureSettings, CliError> {
        let base = match self.word("quadrature") {
            None | Some("adaptive") | Some("adaptive_simpson") => {
                if self.contains("nodes") {
                    return Err(CliError::at_line(self.entry("nodes").unwrap().line, "`nodes` requires `quadrature = gauss_legendre`"));
                }
                QuadratureSettings::adaptive(self.number("rel_tol")?.unwrap_or(1e-8))
            }
            Some("gauss_legendre") => {
                if self.contains("rel_tol") {
                    return Err(CliError::at_line(self.entry("rel_tol").unwrap().line, "`rel_tol` requires `quadrature = adaptive`"));
                }
                QuadratureSettings::gauss_legendre(self.count("nodes")?.unwrap_or(128) as usize)
            }
            Some(_) => return Err(Self::bad(self.entry("quadrature").unwrap(), "quadrature", "quadrature rule")),
        };
        let q = base.with_head(self.head()?);
        q.validate().map_err(|e| {
            let key = match q.rule {
                OuterRule::GaussLegendre { .. } => "nodes",
                OuterRule::AdaptiveSimpson { .. } => "rel_tol",
            };
            match self.entry(key) {
                Some(entry) => CliError::at_line(entry.line, e.to_string()),
                None => CliError::config(e.to_string()),
            }
        })?;
        Ok(q)
    }
}

/// Model parameters where `P0`, `tau` and `rho` may vary.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSweep {
    pub mu_s: f64,
    pub sigma_s: f64,
    pub mu_p: f64,
    pub sigma_p: f64,
    pub rho: Vec<f64>,
    pub tau: Vec<f64>,
    pub history: f64,
    pub p0: Vec<f64>,
    pub s0: f64,
}

impl ModelSweep {
    pub fn params(&self, p0: f64, tau: f64, rho: f64) -> Result<ModelParams, CliError> {
        let params = ModelParams {
            confidence: ConfidenceParams::constant(self.mu_p, self.sigma_p, self.history, p0),
            mu_s: self.mu_s,
            sigma_s: self.sigma_s,
            tau,
            rho,
            s0: self.s0,
        };
        confidence_core::model::validate(params).map_err(|errs| CliError::Model(confidence_core::Error::InvalidParams(errs)))
    }

    /// The single parameter set of a sweep without lists.
    pub fn only(&self) -> Result<ModelParams, CliError> {
        match (self.p0.as_slice(), self.tau.as_slice(), self.rho.as_slice()) {
            ([p0], [tau], [rho]) => self.params(*p0, *tau, *rho),
            _ => Err(CliError::config("`P0`, `tau` and `rho` take a single value for this command")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "
        # reference call grid
        mu_P = 0.03
        sigma_P = 0.35
        sigma_S = 0.04
        tau = 5d
        P0 = 10, 100, 1000
        s0 = 450
        r = 0.01   # flat
        T = 3m
        K = 400, 425, 450
    ";

    fn line_of(e: &CliError) -> Option<usize> {
        match e {
            CliError::Config { line, .. } => *line,
            _ => None,
        }
    }

    #[test]
    fn parses_lists_and_durations() {
        let c = Config::parse(BASE).unwrap();
        assert_eq!(c.numbers("P0").unwrap().unwrap(), vec![10.0, 100.0, 1000.0]);
        assert_eq!(c.durations("T").unwrap().unwrap(), vec![63.0 / 252.0]);
        let m = c.model().unwrap();
        assert_eq!(m.tau, vec![5.0 / 252.0]);
        assert_eq!(m.history, 10.0 / 252.0);
        assert_eq!(m.rho, vec![0.0]);
        assert_eq!(c.rates().unwrap(), RatesCurve::flat(0.01));
    }

    #[test]
    fn duration_units() {
        let d = DayCount::default();
        assert_eq!(d.parse("5d"), Some(5.0 / 252.0));
        assert_eq!(d.parse("1w"), Some(5.0 / 252.0));
        assert_eq!(d.parse("2w"), Some(10.0 / 252.0));
        assert_eq!(d.parse("1m"), Some(21.0 / 252.0));
        assert_eq!(d.parse("3m"), Some(63.0 / 252.0));
        assert_eq!(d.parse("1y"), Some(1.0));
        assert_eq!(d.parse("0.25"), Some(0.25));
        assert_eq!(d.parse("3q"), None);
        assert_eq!(d.parse("m"), None);
        let alt = DayCount { per_year: 365.0, per_week: 7.0, per_month: 30.0 };
        assert_eq!(alt.parse("1w"), Some(7.0 / 365.0));
    }

    #[test]
    fn day_count_keys_apply_to_durations_anywhere_in_file() {
        let c = Config::parse("tau = 1w\ndays_per_year = 365\ndays_per_week = 7").unwrap();
        assert_eq!(c.duration("tau").unwrap(), Some(7.0 / 365.0));
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let e = Config::parse("mu_P = 0.03\nsigmaS = 0.04\n").unwrap_err();
        assert_eq!(line_of(&e), Some(2));
        assert!(e.to_string().contains("sigmaS"));
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn malformed_lines() {
        assert_eq!(line_of(&Config::parse("\n\nmu_P 0.03").unwrap_err()), Some(3));
        assert_eq!(line_of(&Config::parse("mu_P =").unwrap_err()), Some(1));
        assert_eq!(line_of(&Config::parse("mu_P = 1\nmu_P = 2").unwrap_err()), Some(2));
        let c = Config::parse("sigma_S = abc").unwrap();
        let e = c.require_number("sigma_S").unwrap_err();
        assert_eq!(line_of(&e), Some(1));
        assert!(e.to_string().contains("sigma_S"));
    }

    #[test]
    fn missing_keys_are_named() {
        let c = Config::parse("mu_P = 0.03").unwrap();
        assert!(c.model().unwrap_err().to_string().contains("`tau`"));
    }

    #[test]
    fn piecewise_rates() {
        let c = Config::parse("r = 1m:0.01, 1y:0.02").unwrap();
        let r = c.rates().unwrap();
        assert_eq!(r.segments(), &[(21.0 / 252.0, 0.01), (1.0, 0.02)]);
        assert!(Config::parse("r = 1m:0.01, 2w:0.02").unwrap().rates().is_err());
    }

    #[test]
    fn quadrature_settings() {
        let c = Config::parse("quadrature = gauss_legendre\nnodes = 8").unwrap();
        assert_eq!(line_of(&c.quadrature().unwrap_err()), Some(2));
        let c = Config::parse("quadrature = gauss_legendre\nnodes = 64\nhead = dropped").unwrap();
        let q = c.quadrature().unwrap();
        assert_eq!(q.rule, OuterRule::GaussLegendre { nodes: 64 });
        assert_eq!(q.head, HeadConvention::Dropped);
        assert!(Config::parse("rel_tol = 1e-3").unwrap().quadrature().is_err());
    }

    #[test]
    fn invalid_model_is_config_error() {
        let c = Config::parse(&BASE.replace("sigma_S = 0.04", "sigma_S = -1")).unwrap();
        let m = c.model().unwrap();
        let e = m.params(100.0, m.tau[0], 0.0).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
