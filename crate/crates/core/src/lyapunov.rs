//! Lyapunov-exponent estimators and continued-fraction approximation of the
//! frequency.
//!
//! Three routes are provided:
//!
//! * [`lyapunov_rational`]: the exact periodic formula
//!   `L(p/q, A) = (1/q) ∫ ln ρ(A_{(p/q)}(x)) dx`, where
//!   `A_{(p/q)}(x) = A(x + (q−1)p/q) ⋯ A(x)`;
//! * [`lyapunov_ergodic`]: the finite-time average `(1/n) ln ‖A_n(x)‖` over a
//!   set of starting phases;
//! * [`lyapunov_irrational`]: the rational formula applied along the
//!   continued-fraction convergents of an irrational frequency.
//!
//! The trace of `A_{(p/q)}` is `1/q`-periodic, and since every entry of `A` has
//! degree at most `K` it is a trigonometric polynomial of degree at most `K` in
//! the variable `y = qx`. The rational estimator exploits this: it samples the
//! trace at a handful of nodes, recovers its coefficients, and evaluates it on
//! the quadrature grid by an inverse FFT. The values agree with multiplying out
//! the product at every grid point, at a fraction of the cost.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::cocycle::{gcd, Cocycle, CocycleMap, Frequency};
use crate::error::{Error, Result};

/// Default quadrature grid over one period of the trace.
pub const DEFAULT_GRID: usize = 4096;
/// Smallest grid accepted by [`lyapunov_rational`].
pub const MIN_GRID: usize = 256;
/// A mode enters a [`TraceProfile`] only if, at some sampling height, its
/// coefficient is at least this fraction of the largest one there. Smaller
/// ratios are indistinguishable from round-off in the products.
pub const PROFILE_FLOOR: f64 = 1e-8;
/// Values of `L` within this distance of zero are reported as zero.
pub const ZERO_CLAMP: f64 = 1e-6;

/// A rational approximation `p/q` of a frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalApprox {
    pub p: i64,
    pub q: u64,
    /// `|α − p/q|`.
    pub err: f64,
}

impl RationalApprox {
    pub fn frequency(&self) -> Frequency {
        Frequency::Rational {
            p: self.p.rem_euclid(self.q as i64),
            q: self.q,
        }
    }
}

/// Continued-fraction convergents of `alpha` with denominator at most `q_max`,
/// in increasing `q`.
///
/// The expansion is run with exact integer arithmetic on the binary value of
/// the double. When two consecutive convergents share a denominator only the
/// closer one is kept.
pub fn convergents(alpha: f64, q_max: u64) -> Result<Vec<RationalApprox>> {
    if !alpha.is_finite() {
        return Err(Error::InvalidInput(format!("frequency {alpha} is not finite")));
    }
    let a0 = alpha.floor();
    let frac = alpha - a0;
    if a0.abs() > 1e15 {
        return Err(Error::InvalidInput(format!("frequency {alpha} is too large")));
    }
    let a0 = a0 as i128;
    // frac = num / den with den a power of two
    let (mut num, mut den) = dyadic(frac)?;

    let (mut h_prev, mut h) = (1i128, a0);
    let (mut k_prev, mut k) = (0i128, 1i128);
    let mut out: Vec<RationalApprox> = Vec::new();
    let push = |p: i128, q: i128, out: &mut Vec<RationalApprox>| {
        let err = (alpha - p as f64 / q as f64).abs();
        let approx = RationalApprox {
            p: p as i64,
            q: q as u64,
            err,
        };
        match out.last() {
            Some(last) if last.q == approx.q => {
                if approx.err <= last.err {
                    *out.last_mut().unwrap() = approx;
                }
            }
            _ => out.push(approx),
        }
    };
    push(h, k, &mut out);
    while num != 0 {
        let a = den / num;
        (den, num) = (num, den % num);
        let h_next = a * h + h_prev;
        let k_next = a * k + k_prev;
        if k_next > q_max as i128 {
            break;
        }
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
        push(h, k, &mut out);
    }
    if let Some(r) = out.iter().find(|r| r.err < 1e-15) {
        return Err(Error::RationalInput {
            alpha,
            p: r.p,
            q: r.q,
        });
    }
    Ok(out)
}

fn dyadic(x: f64) -> Result<(i128, i128)> {
    if x == 0.0 {
        return Ok((0, 1));
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let mant = if exp == 0 {
        (bits & ((1 << 52) - 1)) << 1
    } else {
        (bits & ((1 << 52) - 1)) | (1 << 52)
    };
    // x = mant · 2^(exp − 1075)
    let shift = 1075 - exp;
    if shift <= 0 {
        return Ok(((mant as i128) << (-shift), 1));
    }
    if shift > 120 {
        // below ~1e-20: indistinguishable from zero at double precision
        return Ok((0, 1));
    }
    let mut num = mant as i128;
    let mut den = 1i128 << shift;
    while num % 2 == 0 && den > 1 {
        num /= 2;
        den /= 2;
    }
    Ok((num, den))
}

/// Quadrature settings shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovOptions {
    /// Quadrature points per period of the trace.
    pub grid: usize,
    /// Double the grid until two successive averages agree within `refine_tol`.
    pub refine: bool,
    pub refine_tol: f64,
    pub max_grid: usize,
    /// Largest convergent denominator used for irrational frequencies.
    pub q_cap: u64,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        LyapunovOptions {
            grid: DEFAULT_GRID,
            refine: true,
            refine_tol: 1e-6,
            max_grid: 1 << 16,
            q_cap: 10_000,
        }
    }
}

/// Samples of `tr A_{(p/q)}` on one period, stored against a common log scale.
#[derive(Debug, Clone)]
struct TraceSamples {
    /// Fourier coefficients of `e^{−scale} tr A_{(p/q)}(y/q + iε)` in `y`,
    /// in FFT order.
    coeffs: Vec<Complex64>,
    scale: f64,
}

fn rational_parts(c: &Cocycle) -> Result<(i64, u64)> {
    match c.alpha {
        Frequency::Rational { p, q } => {
            if gcd(p.unsigned_abs(), q) != 1 {
                Err(Error::NonCoprime { p, q })
            } else {
                Ok((p, q))
            }
        }
        Frequency::Irrational { .. } => Err(Error::InvalidInput(
            "the periodic formula needs a rational frequency".into(),
        )),
    }
}

/// Sample `tr A_{(p/q)}(x_j + iε)` at `x_j = j/(q·nodes)` and return the
/// coefficients of the normalized samples.
fn trace_samples(c: &Cocycle, q: u64, eps: f64, nodes: usize) -> Result<TraceSamples> {
    c.map.check_strip(eps)?;
    let raw: Vec<(Complex64, f64)> = (0..nodes)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 / (nodes as f64 * q as f64);
            let p = c.iterate_unchecked(q as i64, Complex64::new(x, eps));
            (p.m.trace(), p.logscale)
        })
        .collect();
    let scale = raw
        .iter()
        .filter(|(t, _)| t.norm() > 0.0)
        .map(|(t, s)| s + t.norm().ln())
        .fold(f64::NEG_INFINITY, f64::max);
    let scale = if scale.is_finite() { scale } else { 0.0 };
    let mut buf: Vec<Complex64> = raw.iter().map(|(t, s)| t * (s - scale).exp()).collect();
    FftPlanner::new().plan_fft_forward(nodes).process(&mut buf);
    let inv = 1.0 / nodes as f64;
    buf.iter_mut().for_each(|v| *v *= inv);
    Ok(TraceSamples { coeffs: buf, scale })
}

/// Number of trace nodes that resolves a degree-`K` polynomial exactly.
fn trace_nodes(map: &CocycleMap) -> usize {
    (2 * map.max_degree() + 2).next_power_of_two().max(8)
}

impl TraceSamples {
    /// Values on a uniform grid of `m` points per period, as `(τ_j, scale)`
    /// with `tr = e^{scale} τ_j`.
    fn on_grid(&self, m: usize) -> Vec<Complex64> {
        let nodes = self.coeffs.len();
        let half = nodes / 2;
        if m >= nodes {
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for (j, c) in self.coeffs.iter().enumerate() {
                if j < half {
                    buf[j] += c;
                } else if j > half {
                    buf[m - (nodes - j)] += c;
                } else {
                    // Nyquist term; zero for exactly resolved traces
                    buf[half] += c * 0.5;
                    buf[m - half] += c * 0.5;
                }
            }
            FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
            buf
        } else {
            (0..m)
                .map(|j| {
                    let y = j as f64 / m as f64;
                    self.coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| {
                            let k = if k <= half { k as f64 } else { k as f64 - nodes as f64 };
                            c * Complex64::from_polar(1.0, 2.0 * PI * k * y)
                        })
                        .sum()
                })
                .collect()
        }
    }

    fn mean_ln_rho(&self, m: usize) -> f64 {
        let det = (-2.0 * self.scale).exp();
        let vals = self.on_grid(m);
        let total: f64 = vals.iter().map(|tau| ln_rho_scaled(*tau, self.scale, det)).sum();
        total / m as f64
    }
}

/// `ln ρ` of a unimodular matrix with trace `e^{scale}·τ`.
#[inline]
fn ln_rho_scaled(tau: Complex64, scale: f64, det: f64) -> f64 {
    let half = tau / 2.0;
    let root = (half * half - det).sqrt();
    let r = (half + root).norm().max((half - root).norm());
    if r == 0.0 {
        0.0
    } else {
        (scale + r.ln()).max(0.0)
    }
}

/// `L(p/q, A_ε)` by the periodic formula on a fixed grid of `grid` points in
/// `[0, 1/q)`.
pub fn lyapunov_rational(c: &Cocycle, eps: f64, grid: usize) -> Result<f64> {
    let (_, q) = rational_parts(c)?;
    if grid < MIN_GRID {
        return Err(Error::InvalidInput(format!("grid {grid} is below {MIN_GRID}")));
    }
    let samples = trace_samples(c, q, eps, trace_nodes(&c.map))?;
    Ok(clamp(samples.mean_ln_rho(grid) / q as f64))
}

/// [`lyapunov_rational`] with the grid doubled until the average settles.
pub fn lyapunov_rational_refined(c: &Cocycle, eps: f64, opts: &LyapunovOptions) -> Result<f64> {
    let (_, q) = rational_parts(c)?;
    if opts.grid < MIN_GRID {
        return Err(Error::InvalidInput(format!("grid {} is below {MIN_GRID}", opts.grid)));
    }
    let samples = trace_samples(c, q, eps, trace_nodes(&c.map))?;
    let mut m = opts.grid;
    let mut value = samples.mean_ln_rho(m);
    while opts.refine && m < opts.max_grid {
        let next = samples.mean_ln_rho(2 * m);
        m *= 2;
        let settled = (next - value).abs() / q as f64 <= opts.refine_tol;
        value = next;
        if settled {
            break;
        }
    }
    Ok(clamp(value / q as f64))
}

fn clamp(l: f64) -> f64 {
    if l < ZERO_CLAMP {
        0.0
    } else {
        l
    }
}

/// Finite-time estimate `(1/n) ln ‖A_n(x + iε)‖` averaged over `phases`
/// equidistributed starting points.
pub fn lyapunov_ergodic(c: &Cocycle, eps: f64, n: usize, phases: usize) -> Result<f64> {
    if n < 100 {
        return Err(Error::InvalidInput(format!("n = {n} is below 100")));
    }
    if phases == 0 {
        return Err(Error::InvalidInput("at least one phase is needed".into()));
    }
    c.map.check_strip(eps)?;
    let logs: Vec<f64> = (0..phases)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 / phases as f64;
            c.iterate_unchecked(n as i64, Complex64::new(x, eps)).ln_norm()
        })
        .collect();
    let mean = logs.iter().sum::<f64>() / (phases as f64 * n as f64);
    Ok(clamp(mean))
}

/// Estimate of `L(α, A_ε)` for irrational `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrationalEstimate {
    /// Value at the largest convergent used.
    pub value: f64,
    /// `max − min` over the convergents used.
    pub spread: f64,
    pub samples: Vec<(RationalApprox, f64)>,
}

/// Number of convergents combined by [`lyapunov_irrational`].
pub const CONVERGENTS_USED: usize = 3;

/// `L(α, A_ε)` from the periodic formula at the largest convergents of `α`
/// with `q ≤ opts.q_cap`.
pub fn lyapunov_irrational(c: &Cocycle, eps: f64, opts: &LyapunovOptions) -> Result<IrrationalEstimate> {
    let convs = match &c.alpha {
        Frequency::Irrational { convergents, .. } => convergents,
        Frequency::Rational { .. } => {
            return Err(Error::InvalidInput("frequency is rational".into()));
        }
    };
    let usable: Vec<RationalApprox> = convs.iter().copied().filter(|r| r.q <= opts.q_cap).collect();
    if usable.is_empty() {
        return Err(Error::NoConvergents);
    }
    let chosen = &usable[usable.len().saturating_sub(CONVERGENTS_USED)..];
    let mut samples = Vec::with_capacity(chosen.len());
    for r in chosen {
        let approx = Cocycle::new(r.frequency(), c.map.clone());
        samples.push((*r, lyapunov_rational_refined(&approx, eps, opts)?));
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, l)| (lo.min(*l), hi.max(*l)));
    Ok(IrrationalEstimate {
        value: samples.last().expect("nonempty").1,
        spread: hi - lo,
        samples,
    })
}

/// `L(α, A_ε)` by whichever route fits the frequency.
pub fn lyapunov(c: &Cocycle, eps: f64, opts: &LyapunovOptions) -> Result<f64> {
    match c.alpha {
        Frequency::Rational { .. } => lyapunov_rational_refined(c, eps, opts),
        Frequency::Irrational { .. } => Ok(lyapunov_irrational(c, eps, opts)?.value),
    }
}

/// Fourier modes of the periodic trace `tr A_{(p/q)}(x) = Σ a_k e^{2πikqx}`,
/// stored as `(k, (1/q) ln |a_k|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceProfile {
    pub q: u64,
    pub modes: Vec<(i64, f64)>,
}

/// Heights at which the trace is sampled by [`trace_fourier_profile`]; those
/// outside the analyticity strip are skipped.
pub const PROFILE_HEIGHTS: [f64; 9] = [0.0, 0.05, -0.05, 0.1, -0.1, 0.2, -0.2, 0.4, -0.4];

/// Sample the periodic trace on `m` points of one period and keep the modes
/// above [`PROFILE_FLOOR`] relative to the largest.
///
/// `m` counts samples per period of the trace, i.e. points of `[0, 1/q)`.
/// Sampling at height `η` scales mode `k` by `e^{−2πkqη}`, so each mode is
/// read off at whichever of [`PROFILE_HEIGHTS`] resolves it best; at `η = 0`
/// alone the outer modes are usually buried under round-off.
pub fn trace_fourier_profile(c: &Cocycle, m: usize) -> Result<TraceProfile> {
    let (_, q) = rational_parts(c)?;
    let need = 4 * c.map.max_degree() + 1;
    if m < need {
        return Err(Error::InvalidInput(format!(
            "{m} trace samples cannot resolve degree {}; need at least {need}",
            c.map.max_degree()
        )));
    }
    // The trace has period 1/q in x, so its degree in y = qx is at most the
    // map degree; anything beyond is round-off.
    let half = m / 2;
    let degree = c.map.max_degree() as i64;
    // per mode: (relative size, value)
    let mut best: Vec<Option<(f64, f64)>> = vec![None; 2 * degree as usize + 1];
    for &eta in PROFILE_HEIGHTS.iter().filter(|&&h| c.map.check_strip(h).is_ok()) {
        let samples = trace_samples(c, q, eta, m)?;
        let biggest = samples.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if biggest == 0.0 {
            continue;
        }
        for (j, a) in samples.coeffs.iter().enumerate() {
            let k = if j <= half { j as i64 } else { j as i64 - m as i64 };
            let rel = a.norm() / biggest;
            if k.abs() > degree || rel < PROFILE_FLOOR {
                continue;
            }
            let value = (samples.scale + a.norm().ln()) / q as f64 + 2.0 * PI * k as f64 * eta;
            let slot = &mut best[(k + degree) as usize];
            if slot.is_none_or(|(r, _)| rel > r) {
                *slot = Some((rel, value));
            }
        }
    }
    let modes = best
        .iter()
        .enumerate()
        .filter_map(|(i, b)| b.map(|(_, v)| (i as i64 - degree, v)))
        .collect();
    Ok(TraceProfile { q, modes })
}

/// Convex piecewise-linear model `max_k max{value_k − 2πkδ, 0}` of
/// `δ ↦ L(p/q, A_δ)`.
pub fn lyapunov_from_trace(tp: &TraceProfile, delta: f64) -> Result<f64> {
    if tp.modes.is_empty() {
        return Err(Error::EmptyProfile);
    }
    Ok(tp
        .modes
        .iter()
        .map(|(k, v)| v - 2.0 * PI * *k as f64 * delta)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{golden_mean, schrodinger, Mat2};
    use crate::torus::TorusFunction;

    /// Textbook continued-fraction expansion in floating point; good for small
    /// denominators only.
    fn float_convergents(alpha: f64, q_max: u64) -> Vec<(i64, u64)> {
        let mut x = alpha;
        let (mut h0, mut h1) = (0i64, 1i64);
        let (mut k0, mut k1) = (1u64, 0u64);
        let mut out = Vec::new();
        for _ in 0..40 {
            let a = x.floor();
            let (h2, k2) = (a as i64 * h1 + h0, a as u64 * k1 + k0);
            if k2 > q_max {
                break;
            }
            out.push((h2, k2));
            (h0, h1, k0, k1) = (h1, h2, k1, k2);
            let f = x - a;
            if f < 1e-12 {
                break;
            }
            x = 1.0 / f;
        }
        out
    }

    #[test]
    fn golden_convergents_are_fibonacci() {
        let cs = convergents(golden_mean(), 100).unwrap();
        let pq: Vec<(i64, u64)> = cs.iter().map(|r| (r.p, r.q)).collect();
        assert_eq!(pq, vec![(1, 1), (1, 2), (2, 3), (3, 5), (5, 8), (8, 13), (13, 21), (21, 34), (34, 55), (55, 89)]);
        for r in &cs {
            assert!(r.err < 1.0 / (r.q * r.q) as f64);
        }
    }

    #[test]
    fn inverse_pi_matches_float_expansion() {
        let alpha = 1.0 / PI;
        let exact: Vec<(i64, u64)> = convergents(alpha, 120).unwrap().iter().map(|r| (r.p, r.q)).collect();
        assert_eq!(exact, float_convergents(alpha, 120));
        assert!(exact.contains(&(7, 22)));
        let longer: Vec<(i64, u64)> = convergents(alpha, 100_000).unwrap().iter().map(|r| (r.p, r.q)).collect();
        assert_eq!(longer, float_convergents(alpha, 100_000));
    }

    #[test]
    fn degenerate_bound_gives_one_convergent() {
        let cs = convergents(golden_mean(), 1).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].q, 1);
    }

    #[test]
    fn rational_input_is_rejected() {
        assert!(matches!(convergents(0.5, 1000), Err(Error::RationalInput { p: 1, q: 2, .. })));
        assert!(matches!(convergents(0.375, 1000), Err(Error::RationalInput { q: 8, .. })));
        assert!(matches!(convergents(0.1, 1000), Err(Error::RationalInput { p: 1, q: 10, .. })));
        assert!(convergents(2f64.sqrt() - 1.0, 1_000_000).is_ok());
    }

    fn constant(m: Mat2, alpha: Frequency) -> Cocycle {
        Cocycle::new(alpha, CocycleMap::constant(m).unwrap())
    }

    #[test]
    fn rational_constant_maps() {
        let alpha = Frequency::rational(2, 7).unwrap();
        assert_eq!(lyapunov_rational(&constant(Mat2::IDENTITY, alpha.clone()), 0.0, 256).unwrap(), 0.0);
        let l = lyapunov_rational(&constant(Mat2::real(2.0, 0.0, 0.0, 0.5), alpha), 0.0, 256).unwrap();
        assert!((l - 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn rational_errors() {
        let c = Cocycle::new(Frequency::Rational { p: 2, q: 4 }, CocycleMap::identity());
        assert_eq!(lyapunov_rational(&c, 0.0, 256), Err(Error::NonCoprime { p: 2, q: 4 }));
        let c = Cocycle::new(Frequency::rational(1, 3).unwrap(), CocycleMap::identity());
        assert!(lyapunov_rational(&c, 0.0, 16).is_err());
        let m = CocycleMap::identity().complexify(0.0).unwrap();
        let strip_map = schrodinger(&TorusFunction::cosine(1, 1.0).with_strip(0.1), 0.0);
        let c = Cocycle::new(Frequency::rational(1, 3).unwrap(), strip_map);
        assert!(matches!(lyapunov_rational(&c, 0.2, 256), Err(Error::StripExceeded { .. })));
        drop(m);
    }

    #[test]
    fn interpolated_trace_matches_direct_products() {
        let v = TorusFunction::from_modes([
            (1, Complex64::new(1.2, 0.3)),
            (-1, Complex64::new(1.2, -0.3)),
            (2, Complex64::new(0.4, 0.0)),
            (-2, Complex64::new(0.4, 0.0)),
        ])
        .unwrap();
        let c = Cocycle::new(Frequency::rational(5, 13).unwrap(), schrodinger(&v, 0.7));
        let eps = 0.05;
        let grid = 256;
        let direct: f64 = (0..grid)
            .map(|j| {
                let x = j as f64 / (grid as f64 * 13.0);
                c.iterate(13, Complex64::new(x, eps)).unwrap().ln_spectral_radius()
            })
            .sum::<f64>()
            / (grid as f64 * 13.0);
        let fast = lyapunov_rational(&c, eps, grid).unwrap();
        assert!((direct - fast).abs() < 1e-12, "{direct} vs {fast}");
    }

    #[test]
    fn ergodic_constant_maps() {
        let alpha = Frequency::golden();
        assert_eq!(lyapunov_ergodic(&constant(Mat2::IDENTITY, alpha.clone()), 0.0, 100, 3).unwrap(), 0.0);
        let l = lyapunov_ergodic(&constant(Mat2::real(2.0, 0.0, 0.0, 0.5), alpha.clone()), 0.0, 200, 2).unwrap();
        assert!((l - 2f64.ln()).abs() < 1e-10);
        assert!(lyapunov_ergodic(&constant(Mat2::IDENTITY, alpha), 0.0, 99, 1).is_err());
    }

    #[test]
    fn irrational_identity_and_free_laplacian() {
        let opts = LyapunovOptions::default();
        let est = lyapunov_irrational(&Cocycle::new(Frequency::golden(), CocycleMap::identity()), 0.0, &opts).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.spread, 0.0);
        assert_eq!(est.samples.len(), 3);
        let free = Cocycle::new(Frequency::golden(), schrodinger(&TorusFunction::zero(), 3.0));
        let est = lyapunov_irrational(&free, 0.0, &opts).unwrap();
        assert!((est.value - ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-6);
        assert!((est.value - 0.9624).abs() < 1e-4);
    }

    #[test]
    fn no_convergents_below_cap() {
        let opts = LyapunovOptions { q_cap: 0, ..Default::default() };
        let c = Cocycle::new(Frequency::golden(), CocycleMap::identity());
        assert_eq!(lyapunov_irrational(&c, 0.0, &opts), Err(Error::NoConvergents));
    }

    #[test]
    fn trace_profile_examples() {
        let d = constant(Mat2::real(2.0, 0.0, 0.0, 0.5), Frequency::rational(0, 1).unwrap());
        let tp = trace_fourier_profile(&d, 8).unwrap();
        assert_eq!(tp.modes.len(), 1);
        assert_eq!(tp.modes[0].0, 0);
        assert!((tp.modes[0].1 - 2.5f64.ln()).abs() < 1e-14);

        let id = constant(Mat2::IDENTITY, Frequency::rational(3, 7).unwrap());
        let tp = trace_fourier_profile(&id, 8).unwrap();
        assert_eq!(tp.modes.len(), 1);
        assert!((tp.modes[0].1 - 2f64.ln() / 7.0).abs() < 1e-14);
    }

    #[test]
    fn from_trace_examples() {
        let tp = TraceProfile { q: 1, modes: vec![(0, 2.5f64.ln())] };
        assert!((lyapunov_from_trace(&tp, 0.37).unwrap() - 2.5f64.ln()).abs() < 1e-15);
        let tp = TraceProfile { q: 1, modes: vec![(0, 0.1), (-1, 0.05)] };
        let v = lyapunov_from_trace(&tp, 0.1).unwrap();
        assert!((v - (0.05 + 0.2 * PI)).abs() < 1e-15);
        assert!((v - 0.6783).abs() < 1e-4);
        let empty = TraceProfile { q: 1, modes: vec![] };
        assert_eq!(lyapunov_from_trace(&empty, 0.0), Err(Error::EmptyProfile));
    }

    #[test]
    fn amo_trace_has_dominant_negative_mode() {
        let v = TorusFunction::cosine(1, 4.0);
        let c = Cocycle::new(Frequency::rational(13, 21).unwrap(), schrodinger(&v, 0.3));
        let tp = trace_fourier_profile(&c, 16).unwrap();
        let neg = tp.modes.iter().find(|(k, _)| *k == -1).expect("mode −1");
        assert!((neg.1 - 2f64.ln()).abs() < 1e-10);
        // slope of the exact rational formula in δ matches mode −1
        let (l1, l2) = (lyapunov_rational(&c, 0.1, 1024).unwrap(), lyapunov_rational(&c, 0.2, 1024).unwrap());
        assert!(((l2 - l1) / (0.1 * 2.0 * PI) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn outer_modes_are_resolved() {
        // |v̂_{±2}| = 1/2 and the extreme coefficient of the trace is v̂_{±2}^q
        let v = TorusFunction::cosine(2, 1.0);
        let c = Cocycle::new(Frequency::rational(233, 377).unwrap(), schrodinger(&v, 1.0));
        let tp = trace_fourier_profile(&c, 16).unwrap();
        for k in [-2, 2] {
            let m = tp.modes.iter().find(|(j, _)| *j == k).expect("outer mode");
            assert!((m.1 + 2f64.ln()).abs() < 1e-9, "{m:?}");
        }
        assert!(tp.modes.iter().all(|(k, _)| k.abs() <= 2));
        let direct = lyapunov_rational(&c, 0.1, 4096).unwrap();
        let model = lyapunov_from_trace(&tp, 0.1).unwrap();
        assert!((model - direct).abs() < 1e-9, "{model} vs {direct}: {tp:?}");
    }
}
