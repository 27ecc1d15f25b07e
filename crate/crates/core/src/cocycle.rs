//! SL(2,ℂ) matrices, overflow-safe products and cocycle maps over a circle
//! rotation.

use std::f64::consts::LN_2;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lyapunov::{convergents, RationalApprox};
use crate::torus::{phase, unit_phase, PhasePowers, TorusFunction};

/// Largest denominator kept in the continued-fraction expansion of an
/// irrational frequency.
pub const CONVERGENT_Q_MAX: u64 = 1_000_000;

/// Number of real phases on which a [`CocycleMap`] determinant is checked.
pub const DET_CHECK_GRID: usize = 256;

/// Tolerance for `|det A(x) - 1|` on the check grid.
pub const DET_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A complex 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: ONE,
        b: ZERO,
        c: ZERO,
        d: ONE,
    };

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn diag(l: Complex64, r: Complex64) -> Self {
        Mat2::new(l, ZERO, ZERO, r)
    }

    /// Matrix with the given columns.
    pub fn from_columns(u: [Complex64; 2], s: [Complex64; 2]) -> Self {
        Mat2::new(u[0], s[0], u[1], s[1])
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// Adjugate; equals the inverse when `det = 1`.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == ZERO {
            return None;
        }
        let adj = self.adjugate();
        Some(adj.scale(det.inv()))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn columns(&self) -> ([Complex64; 2], [Complex64; 2]) {
        ([self.a, self.c], [self.b, self.d])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    fn frobenius_sq(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()
    }

    /// Operator 2-norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        let f = self.frobenius_sq();
        let dd = self.det().norm();
        let disc = ((f - 2.0 * dd) * (f + 2.0 * dd)).max(0.0);
        ((f + disc.sqrt()) / 2.0).sqrt()
    }

    pub fn is_unimodular(&self, tol: f64) -> bool {
        (self.det() - ONE).norm() <= tol
    }

    pub fn max_diff(&self, other: &Mat2) -> f64 {
        (self.a - other.a)
            .norm()
            .max((self.b - other.b).norm())
            .max((self.c - other.c).norm())
            .max((self.d - other.d).norm())
    }

    /// `e^W` for a traceless `W`.
    pub fn exp_traceless(w: &Mat2) -> Mat2 {
        let mu2 = w.a * w.a + w.b * w.c;
        let mu = mu2.sqrt();
        let (ch, sh_over) = if mu.norm() < 1e-8 {
            (ONE + mu2 / 2.0, ONE + mu2 / 6.0)
        } else {
            (mu.cosh(), mu.sinh() / mu)
        };
        Mat2::new(ch + sh_over * w.a, sh_over * w.b, sh_over * w.c, ch - sh_over * w.a)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    #[inline]
    fn mul(self, r: Mat2) -> Mat2 {
        Mat2::new(
            self.a * r.a + self.b * r.c,
            self.a * r.b + self.b * r.d,
            self.c * r.a + self.d * r.c,
            self.c * r.b + self.d * r.d,
        )
    }
}

/// Spectral radius of a unimodular matrix, `|t/2 + √(t²/4 − 1)|` on the branch
/// that makes the result at least one.
pub fn spectral_radius(m: &Mat2) -> Result<f64> {
    let err = (m.det() - ONE).norm();
    if err > 1e-6 {
        return Err(Error::NotUnimodular(err));
    }
    let half = m.trace() / 2.0;
    let root = (half * half - ONE).sqrt();
    let r = (half + root).norm().max((half - root).norm());
    Ok(r.max(1.0))
}

/// Renormalized product `e^{logscale} · m`.
///
/// `m` is kept with largest entry modulus in `[1/2, 2]`; renormalization
/// multiplies by a power of two, so it never perturbs the represented matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMatrix {
    pub m: Mat2,
    pub logscale: f64,
}

impl ScaledMatrix {
    pub const IDENTITY: ScaledMatrix = ScaledMatrix {
        m: Mat2::IDENTITY,
        logscale: 0.0,
    };

    pub fn new(m: Mat2) -> Self {
        let mut s = ScaledMatrix { m, logscale: 0.0 };
        s.renormalize();
        s
    }

    #[inline]
    pub fn renormalize(&mut self) {
        let n = self.m.max_abs();
        if (0.5..=2.0).contains(&n) || n == 0.0 || !n.is_finite() {
            return;
        }
        let e = n.log2().floor() as i32;
        self.m = self.m.scale_real(2f64.powi(-e));
        self.logscale += e as f64 * LN_2;
    }

    /// Replace the product `P` by `a · P`.
    #[inline]
    pub fn left_mul(&mut self, a: &Mat2) {
        self.m = *a * self.m;
        self.renormalize();
    }

    pub fn mul(&self, other: &ScaledMatrix) -> ScaledMatrix {
        let mut out = ScaledMatrix {
            m: self.m * other.m,
            logscale: self.logscale + other.logscale,
        };
        out.renormalize();
        out
    }

    /// Inverse of a represented unimodular matrix.
    pub fn inverse(&self) -> ScaledMatrix {
        ScaledMatrix {
            m: self.m.adjugate(),
            logscale: self.logscale,
        }
    }

    /// The represented matrix; overflows when `logscale` exceeds ~700.
    pub fn represented(&self) -> Mat2 {
        self.m.scale_real(self.logscale.exp())
    }

    /// `ln ‖P‖` in the operator norm.
    pub fn ln_norm(&self) -> f64 {
        self.logscale + self.m.op_norm().ln()
    }

    /// `ln ρ(P)` for a represented unimodular `P`, computed without forming `P`.
    pub fn ln_spectral_radius(&self) -> f64 {
        let s = self.logscale;
        // det m = e^{-2s} exactly; the computed determinant of `m` loses all
        // relative accuracy once s is large.
        let det = if s > 0.0 { (-2.0 * s).exp() } else { self.m.det().norm().max(0.0) };
        let half = self.m.trace() / 2.0;
        let root = (half * half - Complex64::new(det, 0.0)).sqrt();
        let r = (half + root).norm().max((half - root).norm());
        if r == 0.0 {
            return 0.0;
        }
        (s + r.ln()).max(0.0)
    }
}

/// Rotation number of the base dynamics.
#[derive(Debug, Clone, PartialEq)]
pub enum Frequency {
    /// `p/q` in lowest terms with `0 <= p < q`.
    Rational { p: i64, q: u64 },
    /// A double reduced mod 1, together with its continued-fraction
    /// convergents up to [`CONVERGENT_Q_MAX`].
    Irrational {
        value: f64,
        convergents: Vec<RationalApprox>,
    },
}

impl Frequency {
    pub fn rational(p: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        if gcd(p.unsigned_abs(), q) != 1 {
            return Err(Error::NonCoprime { p, q });
        }
        Ok(Frequency::Rational {
            p: p.rem_euclid(q as i64),
            q,
        })
    }

    pub fn irrational(alpha: f64) -> Result<Self> {
        let value = alpha.rem_euclid(1.0);
        let convergents = convergents(value, CONVERGENT_Q_MAX)?;
        Ok(Frequency::Irrational { value, convergents })
    }

    /// `(√5 − 1)/2`.
    pub fn golden() -> Self {
        Self::irrational(golden_mean()).expect("golden mean is irrational")
    }

    pub fn value(&self) -> f64 {
        match self {
            Frequency::Rational { p, q } => *p as f64 / *q as f64,
            Frequency::Irrational { value, .. } => *value,
        }
    }

    /// Fractional part of `kα`, exact for rationals.
    #[inline]
    pub fn orbit_offset(&self, k: i64) -> f64 {
        match self {
            Frequency::Rational { p, q } => {
                let q = *q as i128;
                ((k as i128 * *p as i128).rem_euclid(q)) as f64 / q as f64
            }
            Frequency::Irrational { value, .. } => (k as f64 * value).rem_euclid(1.0),
        }
    }
}

pub fn golden_mean() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// An analytic map `ℝ/ℤ → SL(2,ℂ)` with trigonometric-polynomial entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleMap {
    entries: [TorusFunction; 4],
    real_symmetric: bool,
    degree: Option<i64>,
    max_degree: usize,
}

impl CocycleMap {
    /// `x ↦ [[a(x), b(x)], [c(x), d(x)]]`; the determinant is checked on a
    /// real grid.
    pub fn new(a: TorusFunction, b: TorusFunction, c: TorusFunction, d: TorusFunction) -> Result<Self> {
        let map = Self::new_unchecked([a, b, c, d]);
        let mut worst: f64 = 0.0;
        for j in 0..DET_CHECK_GRID {
            let m = map.eval_real(j as f64 / DET_CHECK_GRID as f64);
            worst = worst.max((m.det() - ONE).norm());
        }
        if worst > DET_TOL {
            return Err(Error::NotUnimodular(worst));
        }
        Ok(map)
    }

    pub(crate) fn new_unchecked(entries: [TorusFunction; 4]) -> Self {
        let real_symmetric = entries.iter().all(TorusFunction::is_real_symmetric);
        let max_degree = entries.iter().map(TorusFunction::degree).max().unwrap_or(0);
        CocycleMap {
            entries,
            real_symmetric,
            degree: None,
            max_degree,
        }
    }

    pub fn constant(m: Mat2) -> Result<Self> {
        Self::new(
            TorusFunction::constant(m.a),
            TorusFunction::constant(m.b),
            TorusFunction::constant(m.c),
            TorusFunction::constant(m.d),
        )
    }

    pub fn identity() -> Self {
        Self::constant(Mat2::IDENTITY).expect("identity is unimodular")
    }

    /// Attach the topological degree (known for rotation-valued maps).
    pub fn with_degree(mut self, degree: i64) -> Self {
        self.degree = Some(degree);
        self
    }

    pub fn topological_degree(&self) -> Option<i64> {
        self.degree
    }

    pub fn entries(&self) -> &[TorusFunction; 4] {
        &self.entries
    }

    pub fn is_real_symmetric(&self) -> bool {
        self.real_symmetric
    }

    /// Largest trigonometric degree among the entries.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn strip(&self) -> f64 {
        self.entries.iter().map(TorusFunction::strip).fold(f64::INFINITY, f64::min)
    }

    pub fn check_strip(&self, im: f64) -> Result<()> {
        let strip = self.strip();
        if im.abs() > strip {
            Err(Error::StripExceeded { im, strip })
        } else {
            Ok(())
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Mat2> {
        self.check_strip(z.im)?;
        Ok(self.eval_powers(&PhasePowers::at(z, self.max_degree)))
    }

    pub fn eval_real(&self, x: f64) -> Mat2 {
        self.eval_powers(&PhasePowers::new(unit_phase(x), self.max_degree))
    }

    #[inline]
    pub fn eval_powers(&self, p: &PhasePowers) -> Mat2 {
        let [a, b, c, d] = &self.entries;
        Mat2::new(
            a.eval_powers(p),
            b.eval_powers(p),
            c.eval_powers(p),
            d.eval_powers(p),
        )
    }

    /// `x ↦ A(x + iε)`.
    pub fn complexify(&self, eps: f64) -> Result<Self> {
        self.check_strip(eps)?;
        let [a, b, c, d] = &self.entries;
        let mut out = Self::new_unchecked([
            a.complexify(eps)?,
            b.complexify(eps)?,
            c.complexify(eps)?,
            d.complexify(eps)?,
        ]);
        out.degree = self.degree;
        Ok(out)
    }

    /// `x ↦ A(nx)`.
    pub fn dilate(&self, n: usize) -> Self {
        let [a, b, c, d] = &self.entries;
        let mut out = Self::new_unchecked([a.dilate(n), b.dilate(n), c.dilate(n), d.dilate(n)]);
        out.degree = self.degree.map(|k| k * n as i64);
        out
    }

    /// Pointwise product `x ↦ A(x)·B(x)`, exact in the Fourier basis.
    pub fn pointwise_mul(&self, rhs: &CocycleMap) -> CocycleMap {
        let [a, b, c, d] = &self.entries;
        let [e, f, g, h] = &rhs.entries;
        Self::new_unchecked([&(a * e) + &(b * g), &(a * f) + &(b * h), &(c * e) + &(d * g), &(c * f) + &(d * h)])
    }

    /// `x ↦ A(x)·e^{t w(x)}` for a traceless perturbation `w = [[w1, w2], [w3, -w1]]`.
    ///
    /// The exponential is summed as `cosh(tμ) I + sinh(tμ)/μ · t w` with
    /// `μ² = w1² + w2 w3`, both factors power series in `μ²`.
    pub fn perturb(&self, w: &[TorusFunction; 3], t: f64) -> CocycleMap {
        let [w1, w2, w3] = w;
        let mu2 = &(w1 * w1) + &(w2 * w3);
        let s = mu2.scale(Complex64::new(t * t, 0.0));
        // Σ s^n/(2n)! and Σ s^n/(2n+1)!
        let mut cosh = TorusFunction::real_constant(1.0);
        let mut sinh = TorusFunction::real_constant(1.0);
        let mut power = TorusFunction::real_constant(1.0);
        let mut fact_even = 1.0;
        let mut fact_odd = 1.0;
        for n in 1..40 {
            power = &power * &s;
            fact_even *= ((2 * n - 1) * (2 * n)) as f64;
            fact_odd *= ((2 * n) * (2 * n + 1)) as f64;
            let term_c = power.scale(Complex64::new(1.0 / fact_even, 0.0));
            let term_s = power.scale(Complex64::new(1.0 / fact_odd, 0.0));
            cosh = &cosh + &term_c;
            sinh = &sinh + &term_s;
            if term_c.l1_norm() <= 1e-18 * cosh.l1_norm() && term_s.l1_norm() <= 1e-18 * sinh.l1_norm() {
                break;
            }
        }
        let tw = |f: &TorusFunction| (&sinh * f).scale(Complex64::new(t, 0.0));
        let e = Self::new_unchecked([&cosh + &tw(w1), tw(w2), tw(w3), &cosh - &tw(w1)]);
        let mut out = self.pointwise_mul(&e);
        out.degree = self.degree;
        out
    }
}

/// Schrödinger map `x ↦ [[E − v(x), −1], [1, 0]]`.
///
/// `v` is expected to be real-symmetric; the result is flagged real-symmetric
/// exactly when `v` is.
pub fn schrodinger(v: &TorusFunction, energy: f64) -> CocycleMap {
    let top = &TorusFunction::real_constant(energy) - v;
    CocycleMap::new_unchecked([
        top,
        TorusFunction::real_constant(-1.0),
        TorusFunction::real_constant(1.0),
        TorusFunction::real_constant(0.0),
    ])
}

/// A cocycle `(α, A)`: the skew product `(x, w) ↦ (x + α, A(x)·w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle {
    pub alpha: Frequency,
    pub map: CocycleMap,
}

/// Phase stepping is refreshed from the exact offset this often.
const PHASE_REFRESH: i64 = 64;

impl Cocycle {
    pub fn new(alpha: Frequency, map: CocycleMap) -> Self {
        Cocycle { alpha, map }
    }

    /// `n`-step transfer matrix `A_n(z) = A(z + (n−1)α) ⋯ A(z)`; for negative
    /// `n`, `A_n(z) = A_{−n}(z + nα)^{−1}`.
    pub fn iterate(&self, n: i64, z: Complex64) -> Result<ScaledMatrix> {
        self.map.check_strip(z.im)?;
        Ok(self.iterate_unchecked(n, z))
    }

    pub(crate) fn iterate_unchecked(&self, n: i64, z: Complex64) -> ScaledMatrix {
        if n >= 0 {
            self.forward(n as u64, z)
        } else {
            let start = z + self.alpha.orbit_offset(n);
            self.forward(n.unsigned_abs(), start).inverse()
        }
    }

    fn forward(&self, n: u64, z: Complex64) -> ScaledMatrix {
        let deg = self.map.max_degree;
        let mut acc = ScaledMatrix::IDENTITY;
        if n == 0 {
            return acc;
        }
        let step = unit_phase(self.alpha.value());
        let mut w = phase(z);
        for k in 0..n as i64 {
            if k % PHASE_REFRESH == 0 && k > 0 {
                w = phase(z + self.alpha.orbit_offset(k));
            }
            let m = self.map.eval_powers(&PhasePowers::new(w, deg));
            acc.left_mul(&m);
            w *= step;
        }
        acc
    }

    /// `(α, A_ε)` with `A_ε(x) = A(x + iε)`.
    pub fn complexify(&self, eps: f64) -> Result<Cocycle> {
        Ok(Cocycle {
            alpha: self.alpha.clone(),
            map: self.map.complexify(eps)?,
        })
    }

    pub fn with_map(&self, map: CocycleMap) -> Cocycle {
        Cocycle {
            alpha: self.alpha.clone(),
            map,
        }
    }
}
