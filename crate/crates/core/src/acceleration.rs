//! ε-profiles of the Lyapunov exponent, the acceleration and regularity.
//!
//! For irrational `α`, `ε ↦ L(α, A_ε)` is convex and piecewise affine with
//! slopes in `2πℤ`; the acceleration is the right slope at `ε` divided by `2π`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::cocycle::Cocycle;
use crate::error::{Error, Result};
use crate::lyapunov::{lyapunov, LyapunovOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelerationOptions {
    /// Initial one-sided step for slope fits.
    pub h0: f64,
    /// Maximum number of halvings of `h0`.
    pub halvings: u32,
    /// Consecutive slope fits must agree within this to stop halving.
    pub agree_tol: f64,
    /// Slopes further than this from an integer are flagged non-quantized.
    pub quantized_tol: f64,
    /// Bound on `|L(h) + L(−h) − 2L(0)|` for two-sided regularity.
    pub affine_tol: f64,
    /// Acceptance band around `j` when searching for an affine piece.
    pub piece_tol: f64,
    /// Profile points used to locate an affine piece.
    pub stratum_points: usize,
    pub lyapunov: LyapunovOptions,
}

impl Default for AccelerationOptions {
    fn default() -> Self {
        AccelerationOptions {
            h0: 0.02,
            halvings: 10,
            agree_tol: 0.02,
            quantized_tol: 0.2,
            affine_tol: 3e-3,
            piece_tol: 0.05,
            stratum_points: 9,
            lyapunov: LyapunovOptions::default(),
        }
    }
}

/// Sampled `ε ↦ L(α, A_ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovProfile {
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    /// Per-point slope divided by `2π`: centered differences inside, one-sided
    /// at the ends.
    pub slopes: Vec<f64>,
    /// Slope of each grid interval divided by `2π`.
    pub interval_slopes: Vec<f64>,
    /// Nearest integer to the right slope at the left end of the grid.
    pub omega: i64,
    /// Distance of that slope from `omega`.
    pub defect: f64,
}

impl LyapunovProfile {
    pub fn from_values(eps: Vec<f64>, values: Vec<f64>) -> Self {
        let n = eps.len();
        let interval_slopes: Vec<f64> = (0..n.saturating_sub(1))
            .map(|i| (values[i + 1] - values[i]) / (2.0 * PI * (eps[i + 1] - eps[i])))
            .collect();
        let slopes = (0..n)
            .map(|i| {
                if i == 0 {
                    interval_slopes[0]
                } else if i == n - 1 {
                    interval_slopes[n - 2]
                } else {
                    (values[i + 1] - values[i - 1]) / (2.0 * PI * (eps[i + 1] - eps[i - 1]))
                }
            })
            .collect();
        let first = interval_slopes[0];
        let omega = first.round() as i64;
        LyapunovProfile {
            eps,
            values,
            slopes,
            defect: (first - omega as f64).abs(),
            interval_slopes,
            omega,
        }
    }

    /// `max(0, −min second difference)`, in the units of `L`.
    pub fn convexity_defect(&self) -> f64 {
        self.values
            .windows(3)
            .zip(self.eps.windows(3))
            .map(|(v, e)| {
                // second divided difference scaled back to a value defect
                let left = (v[1] - v[0]) / (e[1] - e[0]);
                let right = (v[2] - v[1]) / (e[2] - e[1]);
                (left - right) * (e[2] - e[0]) / 2.0
            })
            .fold(0.0, f64::max)
    }

    /// Locations where the slope changes: intervals with non-integer slope and
    /// grid points separating intervals with different integer slopes.
    pub fn breakpoints(&self, tol: f64) -> Vec<f64> {
        let s = &self.interval_slopes;
        let mut out = Vec::new();
        for (i, &si) in s.iter().enumerate() {
            if (si - si.round()).abs() > tol {
                out.push(0.5 * (self.eps[i] + self.eps[i + 1]));
            } else if i + 1 < s.len() {
                let next = s[i + 1];
                if (next - next.round()).abs() <= tol && next.round() != si.round() {
                    out.push(self.eps[i + 1]);
                }
            }
        }
        out
    }

    /// Convex piecewise-linear fit `max_j (c_j + 2π s_j ε)` over the integer
    /// slopes `s_j` seen on intervals with defect below `tol`; returns the
    /// number of pieces and the sup-norm residual on the grid.
    pub fn integer_slope_fit(&self, tol: f64) -> (usize, f64) {
        let mut lines: Vec<(i64, f64, usize)> = Vec::new();
        for (i, &s) in self.interval_slopes.iter().enumerate() {
            if (s - s.round()).abs() > tol {
                continue;
            }
            let k = s.round() as i64;
            let slope = 2.0 * PI * k as f64;
            let c = 0.5 * ((self.values[i] - slope * self.eps[i]) + (self.values[i + 1] - slope * self.eps[i + 1]));
            match lines.iter_mut().find(|(kk, _, _)| *kk == k) {
                Some(line) => {
                    line.1 += c;
                    line.2 += 1;
                }
                None => lines.push((k, c, 1)),
            }
        }
        if lines.is_empty() {
            return (0, f64::INFINITY);
        }
        let residual = self
            .eps
            .iter()
            .zip(&self.values)
            .map(|(&e, &v)| {
                let fit = lines
                    .iter()
                    .map(|(k, c, n)| c / *n as f64 + 2.0 * PI * *k as f64 * e)
                    .fold(f64::NEG_INFINITY, f64::max);
                (fit - v).abs()
            })
            .fold(0.0, f64::max);
        (lines.len(), residual)
    }
}

/// Profile of `L(α, A_ε)` on `n_pts` equally spaced `ε ∈ [eps_min, eps_max]`.
pub fn epsilon_profile(
    c: &Cocycle,
    eps_min: f64,
    eps_max: f64,
    n_pts: usize,
    opts: &AccelerationOptions,
) -> Result<LyapunovProfile> {
    if n_pts < 5 {
        return Err(Error::InvalidInput(format!("a profile needs at least 5 points, got {n_pts}")));
    }
    if eps_max.is_nan() || eps_min.is_nan() || eps_max <= eps_min {
        return Err(Error::InvalidInput(format!("empty ε range [{eps_min}, {eps_max}]")));
    }
    c.map.check_strip(eps_min)?;
    c.map.check_strip(eps_max)?;
    let eps: Vec<f64> = (0..n_pts)
        .map(|i| eps_min + (eps_max - eps_min) * i as f64 / (n_pts - 1) as f64)
        .collect();
    let values = eps
        .par_iter()
        .map(|&e| lyapunov(c, e, &opts.lyapunov))
        .collect::<Result<Vec<f64>>>()?;
    Ok(LyapunovProfile::from_values(eps, values))
}

/// One-sided acceleration estimate at `ε₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Acceleration {
    pub omega: i64,
    pub defect: f64,
    /// Raw fitted slope divided by `2π`.
    pub slope: f64,
    /// Step of the accepted fit.
    pub h: f64,
    /// Two consecutive fits agreed within the tolerance.
    pub converged: bool,
    /// The slope is too far from an integer: an estimator failure or a
    /// boundary between affine pieces.
    pub non_quantized: bool,
}

/// Fit the right slope of `ε ↦ L(α, A_ε)` on `[ε₀, ε₀ + h]`, halving `h` from
/// `opts.h0` until two consecutive fits agree.
pub fn acceleration_at(c: &Cocycle, eps0: f64, opts: &AccelerationOptions) -> Result<Acceleration> {
    c.map.check_strip(eps0)?;
    c.map.check_strip(eps0 + opts.h0)?;
    let l0 = lyapunov(c, eps0, &opts.lyapunov)?;
    let slope = |h: f64| -> Result<f64> { Ok((lyapunov(c, eps0 + h, &opts.lyapunov)? - l0) / (2.0 * PI * h)) };
    let mut h = opts.h0;
    let mut prev = slope(h)?;
    let mut converged = false;
    for _ in 0..opts.halvings {
        h /= 2.0;
        let next = slope(h)?;
        let agree = (next - prev).abs() <= opts.agree_tol;
        prev = next;
        if agree {
            converged = true;
            break;
        }
    }
    let omega = prev.round() as i64;
    let defect = (prev - omega as f64).abs();
    Ok(Acceleration {
        omega,
        defect,
        slope: prev,
        h,
        converged,
        non_quantized: defect > opts.quantized_tol,
    })
}

/// Whether `ε ↦ L(α, A_ε)` is affine near zero.
///
/// Real-symmetric maps have an even profile, so regularity is equivalent to
/// zero acceleration; other maps are tested as in [`is_regular_at`].
pub fn is_regular(c: &Cocycle, opts: &AccelerationOptions) -> Result<bool> {
    if c.map.is_real_symmetric() {
        return Ok(acceleration_at(c, 0.0, opts)?.omega == 0);
    }
    is_regular_at(c, 0.0, opts)
}

/// Whether `ε ↦ L(α, A_ε)` is affine near `ε₀`, by the symmetric second
/// difference on `[ε₀ − h, ε₀ + h]`.
pub fn is_regular_at(c: &Cocycle, eps0: f64, opts: &AccelerationOptions) -> Result<bool> {
    let h = opts.h0;
    let [lm, l0, lp] = [eps0 - h, eps0, eps0 + h].map(|e| lyapunov(c, e, &opts.lyapunov));
    Ok((lp? + lm? - 2.0 * l0?).abs() <= opts.affine_tol)
}

/// `L(α, A_{δ'}) − 2πjδ'` evaluated on an affine piece of slope `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StratifiedL {
    pub value: f64,
    pub delta_prime: f64,
    /// Same quantity at a second point of the piece.
    pub alternate: f64,
    pub alternate_delta: f64,
}

/// Evaluate `L_{δ,j}` on the longest run of profile intervals in `(0, δ]`
/// whose slope is `j`, at the midpoint of that run.
pub fn stratified_l(c: &Cocycle, j: i64, delta: f64, opts: &AccelerationOptions) -> Result<StratifiedL> {
    let profile = epsilon_profile(c, 0.0, delta, opts.stratum_points.max(5), opts)?;
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    let s = &profile.interval_slopes;
    for i in 0..=s.len() {
        let on = i < s.len() && (s[i] - j as f64).abs() <= opts.piece_tol;
        match (on, start) {
            (true, None) => start = Some(i),
            (false, Some(a)) => {
                if best.is_none_or(|(ba, bb)| i - a > bb - ba) {
                    best = Some((a, i));
                }
                start = None;
            }
            _ => {}
        }
    }
    let (a, b) = best.ok_or(Error::WrongStratum(j))?;
    let (lo, hi) = (profile.eps[a], profile.eps[b]);
    let mid = 0.5 * (lo + hi);
    let alt = lo + 0.25 * (hi - lo);
    let eval = |e: f64| -> Result<f64> { Ok(lyapunov(c, e, &opts.lyapunov)? - 2.0 * PI * j as f64 * e) };
    Ok(StratifiedL {
        value: eval(mid)?,
        delta_prime: mid,
        alternate: eval(alt)?,
        alternate_delta: alt,
    })
}
