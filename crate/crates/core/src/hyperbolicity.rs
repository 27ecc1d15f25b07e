//! Invariant splittings, the diagonalizing conjugation and the derivative of
//! the Lyapunov exponent.
//!
//! Directions are unit vectors in `ℂ²`; distances between complex lines are
//! the sine of the angle between them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::acceleration::{acceleration_at, is_regular_at, AccelerationOptions};
use crate::cocycle::{Cocycle, Mat2};
use crate::error::{Error, Result};
use crate::lyapunov::lyapunov;
use crate::torus::TorusFunction;

pub type Vec2 = [Complex64; 2];

/// Largest product length tried by [`splitting`].
pub const N_MAX: usize = 1 << 14;
/// Invariance residual required to accept a splitting.
pub const RESIDUAL_TOL: f64 = 1e-6;
/// Splittings with a smaller minimal angle are rejected by [`conjugation`].
pub const DEGENERATE_ANGLE: f64 = 1e-8;
/// `L` at or below this leaves hyperbolicity undecided.
pub const L_THRESHOLD: f64 = 1e-3;

// Fixed generic reference vectors; projecting them onto u and s fixes a
// continuous gauge. Their slopes are not real, so they are never orthogonal
// to a real line.
const REF_U: Vec2 = [Complex64::new(0.8, 0.0), Complex64::new(0.36, 0.48)];
const REF_S: Vec2 = [Complex64::new(0.48, -0.36), Complex64::new(0.8, 0.0)];

fn norm(v: &Vec2) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

fn normalize(v: Vec2) -> Vec2 {
    let n = norm(&v);
    [v[0] / n, v[1] / n]
}

/// Sine of the angle between the complex lines spanned by `u` and `v`.
pub fn projective_distance(u: &Vec2, v: &Vec2) -> f64 {
    let n = norm(u) * norm(v);
    if n == 0.0 {
        return 1.0;
    }
    ((u[0] * v[1] - u[1] * v[0]).norm() / n).min(1.0)
}

/// Complex slope `v₀/v₁` of a direction, `None` for the point at infinity.
pub fn slope(v: &Vec2) -> Option<Complex64> {
    if v[1] == Complex64::new(0.0, 0.0) {
        None
    } else {
        Some(v[0] / v[1])
    }
}

/// Top eigenvector of the Hermitian matrix `[[p, r], [r̄, t]]`.
fn top_eigenvector(p: f64, r: Complex64, t: f64) -> Vec2 {
    let top = 0.5 * (p + t) + (0.25 * (p - t) * (p - t) + r.norm_sqr()).sqrt();
    let a = [r, Complex64::new(top - p, 0.0)];
    let b = [Complex64::new(top - t, 0.0), r.conj()];
    let v = if norm(&a) >= norm(&b) { a } else { b };
    if norm(&v) == 0.0 {
        return [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    }
    normalize(v)
}

/// Dominant right singular vector.
fn dominant_right(m: &Mat2) -> Vec2 {
    // m* m
    let p = m.a.norm_sqr() + m.c.norm_sqr();
    let t = m.b.norm_sqr() + m.d.norm_sqr();
    let r = m.a.conj() * m.b + m.c.conj() * m.d;
    top_eigenvector(p, r, t)
}

/// Dominant left singular vector.
fn dominant_left(m: &Mat2) -> Vec2 {
    // m m*
    let p = m.a.norm_sqr() + m.b.norm_sqr();
    let t = m.c.norm_sqr() + m.d.norm_sqr();
    let r = m.a * m.c.conj() + m.b * m.d.conj();
    top_eigenvector(p, r, t)
}

fn perp(v: &Vec2) -> Vec2 {
    [-v[1].conj(), v[0].conj()]
}

/// Orthogonal projection of `r` onto the line spanned by the unit vector `e`.
fn project(e: &Vec2, r: &Vec2) -> Vec2 {
    let ip = e[0].conj() * r[0] + e[1].conj() * r[1];
    [e[0] * ip, e[1] * ip]
}

fn apply(m: &Mat2, v: &Vec2) -> Vec2 {
    m.apply(*v)
}

/// Unstable and stable lines at `x` from products of length `n` of the
/// (already complexified) cocycle.
fn lines_at(c: &Cocycle, n: usize, x: f64) -> (Vec2, Vec2) {
    let forward = c.iterate_unchecked(n as i64, Complex64::new(x, 0.0)).m;
    let s = perp(&dominant_right(&forward));
    let start = x + c.alpha.orbit_offset(-(n as i64));
    let backward = c.iterate_unchecked(n as i64, Complex64::new(start, 0.0)).m;
    let u = dominant_left(&backward);
    (u, s)
}

/// Basis `B = [u | s]` with unit `u` column and `det B = 1`, in the projection
/// gauge.
fn basis_from_lines(u: &Vec2, s: &Vec2) -> Mat2 {
    let u = normalize(project(u, &REF_U));
    let s = project(s, &REF_S);
    let det = u[0] * s[1] - u[1] * s[0];
    Mat2::from_columns(u, [s[0] / det, s[1] / det])
}

/// A numerically computed invariant splitting `ℂ² = u(x) ⊕ s(x)` of the
/// complexified cocycle `(α, A_ε)`, sampled on `x_j = j/M`.
#[derive(Debug, Clone)]
pub struct Splitting {
    pub eps: f64,
    /// Product length of the accepted splitting.
    pub n: usize,
    pub grid: Vec<f64>,
    /// Unit vectors along `u(x_j)`.
    pub u: Vec<Vec2>,
    /// Unit vectors along `s(x_j)`.
    pub s: Vec<Vec2>,
    /// Same at `x_j + α`.
    pub u_next: Vec<Vec2>,
    pub s_next: Vec<Vec2>,
    pub min_angle: f64,
    /// Max distance between `A(x_j)·u(x_j)` and `u(x_j + α)`, and likewise for `s`.
    pub inv_residual: f64,
    /// Max change of the directions between product lengths `n/2` and `n`.
    pub drift: f64,
    /// Relative interpolation mismatch of `B` at the grid midpoints.
    pub mismatch: f64,
    cocycle: Cocycle,
}

impl Splitting {
    /// The complexified cocycle `(α, A_ε)`.
    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    /// `B(x_j)`.
    pub fn basis(&self, j: usize) -> Mat2 {
        basis_from_lines(&self.u[j], &self.s[j])
    }

    /// `B(x_j + α)`.
    pub fn basis_next(&self, j: usize) -> Mat2 {
        basis_from_lines(&self.u_next[j], &self.s_next[j])
    }

    /// `B(x)` at an arbitrary real phase, recomputed from products of length `n`.
    pub fn basis_at(&self, x: f64) -> Mat2 {
        let (u, s) = lines_at(&self.cocycle, self.n, x);
        basis_from_lines(&u, &s)
    }

    /// Slopes `(u, s)` on the grid.
    pub fn slopes(&self) -> Vec<(Option<Complex64>, Option<Complex64>)> {
        self.u.iter().zip(&self.s).map(|(u, s)| (slope(u), slope(s))).collect()
    }
}

struct Sampled {
    u: Vec<Vec2>,
    s: Vec<Vec2>,
    u_next: Vec<Vec2>,
    s_next: Vec<Vec2>,
}

fn sample(c: &Cocycle, n: usize, grid: &[f64]) -> Sampled {
    let alpha = c.alpha.value();
    let rows: Vec<(Vec2, Vec2, Vec2, Vec2)> = grid
        .par_iter()
        .map(|&x| {
            let (u, s) = lines_at(c, n, x);
            let (un, sn) = lines_at(c, n, x + alpha);
            (u, s, un, sn)
        })
        .collect();
    let mut out = Sampled {
        u: Vec::with_capacity(grid.len()),
        s: Vec::with_capacity(grid.len()),
        u_next: Vec::with_capacity(grid.len()),
        s_next: Vec::with_capacity(grid.len()),
    };
    for (u, s, un, sn) in rows {
        out.u.push(u);
        out.s.push(s);
        out.u_next.push(un);
        out.s_next.push(sn);
    }
    out
}

fn residuals(c: &Cocycle, grid: &[f64], smp: &Sampled) -> (f64, f64) {
    let mut res: f64 = 0.0;
    let mut angle: f64 = 1.0;
    for (j, &x) in grid.iter().enumerate() {
        let a = c.map.eval_real(x);
        res = res
            .max(projective_distance(&apply(&a, &smp.u[j]), &smp.u_next[j]))
            .max(projective_distance(&apply(&a, &smp.s[j]), &smp.s_next[j]));
        angle = angle
            .min(projective_distance(&smp.u[j], &smp.s[j]))
            .min(projective_distance(&smp.u_next[j], &smp.s_next[j]));
    }
    (res, angle)
}

fn drift(a: &Sampled, b: &Sampled) -> f64 {
    let pairs = [(&a.u, &b.u), (&a.s, &b.s), (&a.u_next, &b.u_next), (&a.s_next, &b.s_next)];
    pairs
        .iter()
        .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| projective_distance(p, q)))
        .fold(0.0, f64::max)
}

/// Interpolation mismatch of `B` at grid midpoints.
pub const SMOOTH_TOL: f64 = 1e-6;
/// Largest phase grid tried by [`splitting`].
pub const GRID_MAX: usize = 4096;

/// Invariant splitting of `(α, A_ε)` on `grid` equally spaced phases.
///
/// Products start at length `n` and double until the invariance residual and
/// the drift between consecutive lengths are both below [`RESIDUAL_TOL`].
/// The splitting must also be continuous: the trigonometric interpolant of
/// `B` through the grid has to reproduce `B` at the midpoints within
/// [`SMOOTH_TOL`]. The grid is doubled up to [`GRID_MAX`] until it does.
pub fn splitting(c: &Cocycle, eps: f64, n: usize, grid: usize) -> Result<Splitting> {
    if n < 50 {
        return Err(Error::InvalidInput(format!("product length {n} is below 50")));
    }
    if grid < 8 {
        return Err(Error::InvalidInput(format!("grid {grid} is below 8")));
    }
    let ce = c.complexify(eps)?;
    let mut m = grid;
    let mut len = n;
    loop {
        let mut sp = converge_in_n(&ce, eps, len, m)?;
        let mismatch = midpoint_mismatch(&sp)?;
        if mismatch <= SMOOTH_TOL {
            sp.mismatch = mismatch;
            return Ok(sp);
        }
        if 2 * m > GRID_MAX.max(grid) {
            return Err(Error::NotHyperbolic {
                n: sp.n,
                residual: mismatch,
            });
        }
        m *= 2;
        len = (sp.n / 2).max(n);
    }
}

fn converge_in_n(ce: &Cocycle, eps: f64, n: usize, grid: usize) -> Result<Splitting> {
    let xs: Vec<f64> = (0..grid).map(|j| j as f64 / grid as f64).collect();
    let mut len = n;
    let mut prev = sample(ce, len, &xs);
    let mut last_res = f64::INFINITY;
    while 2 * len <= N_MAX {
        let next_len = 2 * len;
        let next = sample(ce, next_len, &xs);
        let (res, angle) = residuals(ce, &xs, &next);
        let d = drift(&prev, &next);
        last_res = res.max(d);
        if res <= RESIDUAL_TOL && d <= RESIDUAL_TOL {
            return Ok(Splitting {
                eps,
                n: next_len,
                grid: xs,
                u: next.u,
                s: next.s,
                u_next: next.u_next,
                s_next: next.s_next,
                min_angle: angle,
                inv_residual: res,
                drift: d,
                mismatch: f64::NAN,
                cocycle: ce.clone(),
            });
        }
        prev = next;
        len = next_len;
    }
    Err(Error::NotHyperbolic {
        n: len,
        residual: last_res,
    })
}

/// Relative mismatch between the grid interpolant of `B` and `B` itself at
/// the grid midpoints.
fn midpoint_mismatch(sp: &Splitting) -> Result<f64> {
    let m = sp.grid.len();
    let bases: Vec<Mat2> = (0..m).map(|j| sp.basis(j)).collect();
    let scale = bases.iter().map(Mat2::max_abs).fold(0.0, f64::max);
    let pick: [fn(&Mat2) -> Complex64; 4] = [|b| b.a, |b| b.b, |b| b.c, |b| b.d];
    let fits = pick
        .iter()
        .map(|f| TorusFunction::from_samples(&bases.iter().map(f).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let mids: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) / m as f64).collect();
    let direct: Vec<Mat2> = mids.par_iter().map(|&x| sp.basis_at(x)).collect();
    let worst = mids
        .iter()
        .zip(&direct)
        .map(|(&x, b)| {
            pick.iter()
                .zip(&fits)
                .map(|(f, fit)| (fit.eval_real(x) - f(b)).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Ok(worst / scale)
}

/// Settings for the hyperbolicity routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingOptions {
    /// Initial product length.
    pub n0: usize,
    /// Phase grid size.
    pub grid: usize,
}

impl Default for SplittingOptions {
    fn default() -> Self {
        SplittingOptions { n0: 50, grid: 256 }
    }
}

/// Two independent verdicts on uniform hyperbolicity of `(α, A_ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicityCertificate {
    /// An invariant splitting was found.
    pub by_splitting: bool,
    /// `L > 0` and `ε ↦ L` is affine near `ε`.
    pub by_l_and_omega: bool,
    pub agree: bool,
    pub l: f64,
    /// Right acceleration at `ε`.
    pub omega: i64,
}

/// Compare the splitting construction against the `(L, ω)` criterion.
///
/// At `ε = 0` for real-symmetric maps the second route is `ω = 0`; elsewhere
/// it is two-sided regularity at `ε`.
pub fn is_uniformly_hyperbolic(
    c: &Cocycle,
    eps: f64,
    sopts: &SplittingOptions,
    aopts: &AccelerationOptions,
) -> Result<HyperbolicityCertificate> {
    let l = lyapunov(c, eps, &aopts.lyapunov)?;
    if l <= L_THRESHOLD {
        return Err(Error::Inconclusive(l));
    }
    let acc = acceleration_at(c, eps, aopts)?;
    let regular = if eps == 0.0 && c.map.is_real_symmetric() {
        acc.omega == 0
    } else {
        is_regular_at(c, eps, aopts)?
    };
    let by_splitting = match splitting(c, eps, sopts.n0, sopts.grid) {
        Ok(_) => true,
        Err(Error::NotHyperbolic { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok(HyperbolicityCertificate {
        by_splitting,
        by_l_and_omega: regular,
        agree: by_splitting == regular,
        l,
        omega: acc.omega,
    })
}

/// `B(x + α)^{−1} A(x) B(x) = diag(λ(x), λ(x)^{−1})` on the splitting grid.
#[derive(Debug, Clone)]
pub struct Conjugation {
    pub basis: Vec<Mat2>,
    pub lambda: Vec<Complex64>,
    pub lambda_fit: TorusFunction,
    /// Grid mean of `ln |λ|`.
    pub mean_ln_lambda: f64,
    /// Counterclockwise winding number of `λ` around zero.
    pub winding: i64,
    /// Largest off-diagonal entry of the conjugated matrix.
    pub off_diagonal: f64,
}

fn check_angle(sp: &Splitting) -> Result<()> {
    if sp.min_angle < DEGENERATE_ANGLE {
        return Err(Error::DegenerateSplitting(sp.min_angle));
    }
    Ok(())
}

/// Counterclockwise winding number of a closed sampled curve around zero.
pub fn winding_number(samples: &[Complex64]) -> i64 {
    let n = samples.len();
    let turns: f64 = (0..n).map(|j| (samples[(j + 1) % n] / samples[j]).arg()).sum();
    (turns / (2.0 * PI)).round() as i64
}

pub fn conjugation(sp: &Splitting) -> Result<Conjugation> {
    check_angle(sp)?;
    let c = sp.cocycle();
    let mut basis = Vec::with_capacity(sp.grid.len());
    let mut lambda = Vec::with_capacity(sp.grid.len());
    let mut off: f64 = 0.0;
    for (j, &x) in sp.grid.iter().enumerate() {
        let b = sp.basis(j);
        let bn = sp.basis_next(j);
        let t = bn.adjugate() * c.map.eval_real(x) * b;
        off = off.max(t.b.norm()).max(t.c.norm());
        basis.push(b);
        lambda.push(t.a);
    }
    let mean_ln_lambda = lambda.iter().map(|l| l.norm().ln()).sum::<f64>() / lambda.len() as f64;
    Ok(Conjugation {
        lambda_fit: TorusFunction::from_samples(&lambda)?,
        winding: winding_number(&lambda),
        mean_ln_lambda,
        off_diagonal: off,
        basis,
        lambda,
    })
}

/// `(q₁, q₂, q₃) = (ad + bc, cd, −ab)` for `B = [[a, b], [c, d]]`.
pub fn coefficients_from_basis(b: &Mat2) -> [Complex64; 3] {
    [b.a * b.d + b.b * b.c, b.c * b.d, -(b.a * b.b)]
}

/// Coefficients of the derivative of `L` at the complexified phase `x + iε`.
#[derive(Debug, Clone)]
pub struct DerivativeCoefficients {
    pub eps: f64,
    pub grid: Vec<f64>,
    /// `q_i(x_j)` for `i = 1, 2, 3`.
    pub samples: [Vec<Complex64>; 3],
    pub q1: TorusFunction,
    pub q2: TorusFunction,
    pub q3: TorusFunction,
}

pub fn derivative_coefficients(sp: &Splitting) -> Result<DerivativeCoefficients> {
    check_angle(sp)?;
    let mut samples: [Vec<Complex64>; 3] = Default::default();
    for j in 0..sp.grid.len() {
        let q = coefficients_from_basis(&sp.basis(j));
        for i in 0..3 {
            samples[i].push(q[i]);
        }
    }
    Ok(DerivativeCoefficients {
        eps: sp.eps,
        grid: sp.grid.clone(),
        q1: TorusFunction::from_samples(&samples[0])?,
        q2: TorusFunction::from_samples(&samples[1])?,
        q3: TorusFunction::from_samples(&samples[2])?,
        samples,
    })
}

/// `d/dt L(α, A_ε e^{t w_ε})` at `t = 0` for `w = [[w₁, w₂], [w₃, −w₁]]`.
pub fn directional_derivative(dc: &DerivativeCoefficients, w: &[TorusFunction; 3]) -> Result<f64> {
    let ws = w
        .iter()
        .map(|f| f.complexify(dc.eps))
        .collect::<Result<Vec<TorusFunction>>>()?;
    let total: f64 = dc
        .grid
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            (0..3)
                .map(|i| dc.samples[i][j] * ws[i].eval_real(x))
                .sum::<Complex64>()
                .re
        })
        .sum();
    Ok(total / dc.grid.len() as f64)
}

/// Derivatives of `L_{δ,j}` along one Fourier mode of the potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientRow {
    pub k: i64,
    /// Along `w = cos 2πkx`.
    pub d_cos: f64,
    /// Along `w = sin 2πkx`; zero for `k = 0`.
    pub d_sin: f64,
    /// `|e^{−2πkε} q̂₃(−k) + conj(e^{2πkε} q̂₃(k))|`, which vanishes exactly
    /// when both derivatives do.
    pub pairing_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub eps: f64,
    pub j: i64,
    pub rows: Vec<GradientRow>,
    /// Largest absolute derivative over all rows.
    pub witness: f64,
}

/// Gradient of `L_{δ,j}` at a Schrödinger cocycle with respect to the
/// potential, on the modes `0..=k_max`.
///
/// The perturbation replaces `E − v` by `E − v + τw`, so the derivative along
/// `w` is `Re ∫ −w(x + iε) q₃(x + iε) dx`.
pub fn potential_gradient(
    c: &Cocycle,
    j: i64,
    eps: f64,
    k_max: usize,
    sopts: &SplittingOptions,
    aopts: &AccelerationOptions,
) -> Result<Gradient> {
    if j <= 0 {
        return Err(Error::WrongStratum(j));
    }
    let acc = acceleration_at(c, eps, aopts)?;
    if acc.omega != j || acc.non_quantized {
        return Err(Error::WrongStratum(j));
    }
    let sp = splitting(c, eps, sopts.n0, sopts.grid)?;
    let dc = derivative_coefficients(&sp)?;
    let mut rows = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max as i64 {
        let cos = if k == 0 { TorusFunction::real_constant(1.0) } else { TorusFunction::cosine(k, 1.0) };
        let sin = TorusFunction::sine(k, 1.0);
        let along = |w: &TorusFunction| -> Result<f64> {
            let zero = TorusFunction::zero();
            directional_derivative(&dc, &[zero.clone(), zero, -w])
        };
        let d_cos = along(&cos)?;
        let d_sin = if k == 0 { 0.0 } else { along(&sin)? };
        let lo = dc.q3.coeff(-k) * (-2.0 * PI * k as f64 * eps).exp();
        let hi = dc.q3.coeff(k) * (2.0 * PI * k as f64 * eps).exp();
        rows.push(GradientRow {
            k,
            d_cos,
            d_sin,
            pairing_defect: (lo + hi.conj()).norm(),
        });
    }
    let witness = rows.iter().map(|r| r.d_cos.abs().max(r.d_sin.abs())).fold(0.0, f64::max);
    Ok(Gradient { eps, j, rows, witness })
}
