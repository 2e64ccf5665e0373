//! Numerical integration: Gauss–Legendre and Gauss–Hermite rules and a
//! vector-valued adaptive Simpson integrator.
//!
//! The vector form lets several integrands share one subdivision, so linear
//! identities between their integrals (e.g. `C = S·Q1 − K·D·Q2`) survive
//! quadrature to rounding precision.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// Nodes and weights of an `n`-point rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre rule on `[-1, 1]`, nodes by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[m - 1] = 0.0;
    }
    Rule { nodes, weights }
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss–Hermite rule for the weight `e^{-x²}` on the real line.
///
/// Uses the orthonormal recurrence so large `n` does not overflow.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let pim4 = libm::pow(PI, -0.25);
    let mut z = 0.0;
    for i in 0..m {
        // initial guesses for the largest roots, then extrapolate
        z = match i {
            0 => libm::sqrt(2.0 * nf + 1.0) - 1.85575 * libm::pow(2.0 * nf + 1.0, -0.16667),
            1 => z - 1.14 * libm::pow(nf, 0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[n - 1],
            3 => 1.91 * z - 0.91 * nodes[n - 2],
            _ => 2.0 * z - nodes[n - i + 1],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * libm::sqrt(2.0 / jf) * p2 - libm::sqrt((jf - 1.0) / jf) * p3;
            }
            pp = libm::sqrt(2.0 * nf) * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        let w = 2.0 / (pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[m - 1] = 0.0;
    }
    // nodes were filled as (−largest … ) from the front; keep ascending order
    Rule { nodes, weights }
}

/// Integrates `f` over `[a, b]` with a fixed Gauss–Legendre rule.
pub fn integrate_fixed<const N: usize>(rule: &Rule, a: f64, b: f64, mut f: impl FnMut(f64) -> [f64; N]) -> [f64; N] {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut acc = [0.0; N];
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(mid + half * x);
        for k in 0..N {
            acc[k] += w * v[k];
        }
    }
    acc.map(|v| v * half)
}

/// Outcome of [`adaptive_simpson`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adaptive<const N: usize> {
    pub value: [f64; N],
    /// Sum over accepted panels of the Richardson error estimate `|S2 − S1| / 15`.
    pub error: [f64; N],
    /// `false` when some panel hit the depth limit before meeting its tolerance.
    pub converged: bool,
    pub evaluations: usize,
}

/// Tolerances and limits for [`adaptive_simpson`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    /// Absolute floor added to every component tolerance.
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Number of equal panels the interval is split into before adapting.
    pub initial_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-15, max_depth: 40, initial_panels: 16 }
    }
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    fa: [f64; N],
    fm: [f64; N],
    fb: [f64; N],
    whole: [f64; N],
}

fn simpson<const N: usize>(h: f64, fa: &[f64; N], fm: &[f64; N], fb: &[f64; N]) -> [f64; N] {
    core::array::from_fn(|k| h / 6.0 * (fa[k] + 4.0 * fm[k] + fb[k]))
}

/// Adaptive Simpson quadrature of a vector-valued integrand.
///
/// Component `k` is refined until its local error is below
/// `max(rel_tol·|I_k|, abs_tol)` distributed over panels by width, where
/// `I_k` is a coarse pilot estimate.
pub fn adaptive_simpson<const N: usize>(
    mut f: impl FnMut(f64) -> [f64; N],
    a: f64,
    b: f64,
    opts: &AdaptiveOptions,
) -> Adaptive<N> {
    let panels = opts.initial_panels.max(1);
    let width = (b - a) / panels as f64;
    let mut evaluations = 0usize;
    let mut eval = |x: f64, evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut stack: Vec<(Panel<N>, u32, [f64; N])> = Vec::with_capacity(64);
    let mut pilot = [0.0; N];
    let mut first = Vec::with_capacity(panels);
    let mut fa = eval(a, &mut evaluations);
    for i in 0..panels {
        let pa = a + width * i as f64;
        let pb = if i + 1 == panels { b } else { a + width * (i + 1) as f64 };
        let fm = eval(0.5 * (pa + pb), &mut evaluations);
        let fb = eval(pb, &mut evaluations);
        let whole = simpson(pb - pa, &fa, &fm, &fb);
        for k in 0..N {
            pilot[k] += whole[k];
        }
        first.push(Panel { a: pa, b: pb, fa, fm, fb, whole });
        fa = fb;
    }
    let total_tol: [f64; N] = core::array::from_fn(|k| (opts.rel_tol * pilot[k].abs()).max(opts.abs_tol));
    let span = b - a;
    for p in first.into_iter().rev() {
        let share = (p.b - p.a) / span;
        let tol = total_tol.map(|t| t * share);
        stack.push((p, 0, tol));
    }

    let mut value = [0.0; N];
    let mut error = [0.0; N];
    let mut converged = true;
    while let Some((p, depth, tol)) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let flm = eval(0.5 * (p.a + m), &mut evaluations);
        let frm = eval(0.5 * (m + p.b), &mut evaluations);
        let left = simpson(m - p.a, &p.fa, &flm, &p.fm);
        let right = simpson(p.b - m, &p.fm, &frm, &p.fb);
        let delta: [f64; N] = core::array::from_fn(|k| left[k] + right[k] - p.whole[k]);
        let ok = (0..N).all(|k| delta[k].abs() <= 15.0 * tol[k]);
        if ok || depth >= opts.max_depth {
            if !ok {
                converged = false;
            }
            for k in 0..N {
                value[k] += left[k] + right[k] + delta[k] / 15.0;
                error[k] += delta[k].abs() / 15.0;
            }
            continue;
        }
        let half_tol = tol.map(|t| 0.5 * t);
        stack.push((Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right }, depth + 1, half_tol));
        stack.push((Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, depth + 1, half_tol));
    }
    Adaptive { value, error, converged, evaluations }
}

/// Scalar convenience wrapper around [`adaptive_simpson`].
pub fn adaptive_simpson_scalar(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, opts: &AdaptiveOptions) -> Adaptive<1> {
    adaptive_simpson(|x| [f(x)], a, b, opts)
}
