//! Gaussian kernel density estimation.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::normal;

/// Kernel bandwidth selection.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Bandwidth {
    /// Silverman's rule of thumb, `1.06 σ̂ n^{-1/5}`.
    #[default]
    Silverman,
    Fixed(f64),
}

/// Density estimate sampled on an equally spaced grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub bandwidth: f64,
}

impl DensityCurve {
    /// Trapezoid integral of the curve over its abscissae.
    pub fn integral(&self) -> f64 {
        self.x
            .windows(2)
            .zip(self.f.windows(2))
            .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
            .sum()
    }
}

const MIN_POINTS: usize = 512;
const MAX_POINTS: usize = 1 << 16;
const KERNEL_CUTOFF: f64 = 8.0;

/// Gaussian KDE evaluated on `[min − 4h, max + 4h]` with spacing at most `h/4`.
pub fn kde_density(samples: &[f64], bandwidth: Bandwidth) -> Result<DensityCurve> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::DegenerateSample);
    }
    let h = match bandwidth {
        Bandwidth::Fixed(h) if h > 0.0 && h.is_finite() => h,
        Bandwidth::Fixed(h) => return Err(Error::NonPositiveBandwidth(h)),
        Bandwidth::Silverman => {
            let mean = samples.iter().sum::<f64>() / n as f64;
            let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64;
            let h = 1.06 * libm::sqrt(var) * libm::pow(n as f64, -0.2);
            if !(h > 0.0) {
                return Err(Error::DegenerateSample);
            }
            h
        }
    };

    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = sorted[0] - 4.0 * h;
    let hi = sorted[n - 1] + 4.0 * h;
    let points = (libm::ceil((hi - lo) / (0.25 * h)) as usize + 1).clamp(MIN_POINTS, MAX_POINTS);
    let dx = (hi - lo) / (points - 1) as f64;

    let norm = 1.0 / (n as f64 * h);
    let mut x = Vec::with_capacity(points);
    let mut f = Vec::with_capacity(points);
    let mut start = 0;
    for i in 0..points {
        let xi = lo + dx * i as f64;
        while start < n && sorted[start] < xi - KERNEL_CUTOFF * h {
            start += 1;
        }
        let mut sum = 0.0;
        for &s in &sorted[start..] {
            if s > xi + KERNEL_CUTOFF * h {
                break;
            }
            sum += normal::pdf((xi - s) / h);
        }
        x.push(xi);
        f.push(sum * norm);
    }
    Ok(DensityCurve { x, f, bandwidth: h })
}
