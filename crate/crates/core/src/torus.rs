//! Analytic functions on ℝ/ℤ stored as truncated Fourier series.
//!
//! A [`TorusFunction`] is `f(x) = Σ_{|k| ≤ K} c_k e^{2πikx}`. Because the
//! series is finite it extends to an entire function of `z = x + iy`, but each
//! function also carries a strip half-width outside of which evaluation is
//! refused. Finite series default to an infinite strip; functions loaded from
//! files or built as truncations of genuinely non-entire maps carry the band on
//! which the truncation is trustworthy.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Grid used by [`TorusFunction::sup_band_norm`].
pub const SUP_GRID: usize = 1024;

const SYMMETRY_TOL: f64 = 1e-14;

/// `e^{2πi θ}` for real `θ`, reduced mod 1 first so that large arguments keep
/// their fractional precision.
#[inline]
pub fn unit_phase(theta: f64) -> Complex64 {
    let t = theta.rem_euclid(1.0);
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// `e^{2πi z}` for complex `z`.
#[inline]
pub fn phase(z: Complex64) -> Complex64 {
    unit_phase(z.re) * (-2.0 * PI * z.im).exp()
}

/// Powers `w^k` and `w^{-k}` of a phase `w = e^{2πiz}` for `k = 0..=K`, shared
/// between several functions evaluated at the same point.
#[derive(Debug, Clone)]
pub struct PhasePowers {
    pos: Vec<Complex64>,
    neg: Vec<Complex64>,
}

impl PhasePowers {
    pub fn new(w: Complex64, degree: usize) -> Self {
        let mut pos = Vec::with_capacity(degree + 1);
        let mut neg = Vec::with_capacity(degree + 1);
        let w_inv = w.inv();
        pos.push(Complex64::new(1.0, 0.0));
        neg.push(Complex64::new(1.0, 0.0));
        for k in 1..=degree {
            pos.push(pos[k - 1] * w);
            neg.push(neg[k - 1] * w_inv);
        }
        PhasePowers { pos, neg }
    }

    pub fn at(z: Complex64, degree: usize) -> Self {
        Self::new(phase(z), degree)
    }

    pub fn degree(&self) -> usize {
        self.pos.len() - 1
    }
}

/// Truncated Fourier series `Σ_{|k| ≤ K} c_k e^{2πikx}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusFunction {
    degree: usize,
    /// `coeffs[k + degree] = c_k`.
    coeffs: Vec<Complex64>,
    strip: f64,
    real_symmetric: bool,
}

impl TorusFunction {
    fn from_dense(degree: usize, coeffs: Vec<Complex64>, strip: f64) -> Self {
        debug_assert_eq!(coeffs.len(), 2 * degree + 1);
        let real_symmetric = symmetric(degree, &coeffs);
        TorusFunction {
            degree,
            coeffs,
            strip,
            real_symmetric,
        }
    }

    /// Build from `(k, c_k)` pairs. Repeated modes are rejected.
    pub fn from_modes<I>(modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (k, c) in modes {
            if map.insert(k, c).is_some() {
                return Err(Error::DuplicateMode(k));
            }
        }
        let degree = map.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
        for (k, c) in map {
            coeffs[(k + degree as i64) as usize] = c;
        }
        Ok(Self::from_dense(degree, coeffs, f64::INFINITY))
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_dense(0, vec![c], f64::INFINITY)
    }

    pub fn real_constant(c: f64) -> Self {
        Self::constant(Complex64::new(c, 0.0))
    }

    /// `amp · cos(2πkx)`.
    pub fn cosine(k: i64, amp: f64) -> Self {
        if k == 0 {
            return Self::real_constant(amp);
        }
        let h = Complex64::new(amp / 2.0, 0.0);
        Self::from_modes([(k, h), (-k, h)]).expect("distinct modes")
    }

    /// `amp · sin(2πkx)`.
    pub fn sine(k: i64, amp: f64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        let h = Complex64::new(0.0, amp / 2.0);
        Self::from_modes([(k, -h), (-k, h)]).expect("distinct modes")
    }

    /// `c · e^{2πikx}`.
    pub fn exponential(k: i64, c: Complex64) -> Self {
        Self::from_modes([(k, c)]).expect("single mode")
    }

    /// Restrict the guaranteed band of evaluation to `|Im z| ≤ strip`.
    pub fn with_strip(mut self, strip: f64) -> Self {
        self.strip = strip;
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn strip(&self) -> f64 {
        self.strip
    }

    pub fn is_real_symmetric(&self) -> bool {
        self.real_symmetric
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.degree {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.degree as i64) as usize]
        }
    }

    /// Nonzero `(k, c_k)` pairs in ascending `k`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let d = self.degree as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(move |(i, c)| (i as i64 - d, *c))
    }

    /// `Σ |c_k|`, an upper bound for `|f|` on the real line.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    fn check_strip(&self, im: f64) -> Result<()> {
        if im.abs() > self.strip {
            Err(Error::StripExceeded {
                im,
                strip: self.strip,
            })
        } else {
            Ok(())
        }
    }

    /// Evaluate at a complex phase.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_strip(z.im)?;
        Ok(self.eval_powers(&PhasePowers::at(z, self.degree)))
    }

    /// Evaluate at a real phase.
    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval_powers(&PhasePowers::new(unit_phase(x), self.degree))
    }

    /// Evaluate from precomputed powers; the strip is not checked. Modes are
    /// accumulated in ascending `|k|`, each `±k` pair summed before being added.
    #[inline]
    pub fn eval_powers(&self, p: &PhasePowers) -> Complex64 {
        debug_assert!(p.degree() >= self.degree);
        let d = self.degree;
        let mut acc = self.coeffs[d];
        for k in 1..=d {
            acc += self.coeffs[d + k] * p.pos[k] + self.coeffs[d - k] * p.neg[k];
        }
        acc
    }

    /// Discrete Fourier analysis of samples on the grid `x_j = j/M`.
    ///
    /// Modes are folded to `[-⌊M/2⌋, ⌊M/2⌋]`; for even `M` the Nyquist
    /// coefficient is split evenly between `±M/2`.
    pub fn from_samples(samples: &[Complex64]) -> Result<Self> {
        let m = samples.len();
        if m == 0 {
            return Err(Error::EmptyInput);
        }
        let mut buf = samples.to_vec();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let scale = 1.0 / m as f64;
        let half = m / 2;
        let mut modes = Vec::with_capacity(m + 1);
        for (j, c) in buf.into_iter().enumerate() {
            let c = c * scale;
            if m.is_multiple_of(2) && j == half {
                modes.push((half as i64, c * 0.5));
                modes.push((-(half as i64), c * 0.5));
            } else if j <= half {
                modes.push((j as i64, c));
            } else {
                modes.push((j as i64 - m as i64, c));
            }
        }
        Self::from_modes(modes)
    }

    /// Grid approximation of `sup_{|Im z| = δ} |f(z)|` on [`SUP_GRID`] points per
    /// line. Not a certified bound.
    pub fn sup_band_norm(&self, delta: f64) -> Result<f64> {
        self.check_strip(delta)?;
        let mut best: f64 = 0.0;
        for sign in [1.0, -1.0] {
            for j in 0..SUP_GRID {
                let z = Complex64::new(j as f64 / SUP_GRID as f64, sign * delta);
                best = best.max(self.eval_powers(&PhasePowers::at(z, self.degree)).norm());
            }
        }
        Ok(best)
    }

    /// `x ↦ f(x + α)`.
    pub fn shift(&self, alpha: f64) -> Self {
        let d = self.degree as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * unit_phase((i as i64 - d) as f64 * alpha))
            .collect();
        Self::from_dense(self.degree, coeffs, self.strip)
    }

    /// `x ↦ f(x + iε)`; the remaining strip shrinks by `|ε|`.
    pub fn complexify(&self, eps: f64) -> Result<Self> {
        self.check_strip(eps)?;
        let d = self.degree as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * (-2.0 * PI * (i as i64 - d) as f64 * eps).exp())
            .collect();
        Ok(Self::from_dense(self.degree, coeffs, self.strip - eps.abs()))
    }

    /// `x ↦ f(nx)`.
    pub fn dilate(&self, n: usize) -> Self {
        if n == 0 {
            return Self::constant(self.eval_real(0.0));
        }
        let degree = self.degree * n;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
        for (k, c) in self.modes() {
            coeffs[(k * n as i64 + degree as i64) as usize] = c;
        }
        Self::from_dense(degree, coeffs, self.strip / n as f64)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * s).collect();
        Self::from_dense(self.degree, coeffs, self.strip)
    }

    /// Mean value `c_0`.
    pub fn mean(&self) -> Complex64 {
        self.coeffs[self.degree]
    }

    /// Parse the `k re im` text format (one mode per line, `#` comments).
    pub fn parse(text: &str) -> Result<Self> {
        let mut modes = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected `k re im`, found {} fields", fields.len()),
                });
            }
            let bad = |what: &str| Error::Parse {
                line: i + 1,
                msg: format!("cannot parse {what}"),
            };
            let k: i64 = fields[0].parse().map_err(|_| bad("mode index"))?;
            let re: f64 = fields[1].parse().map_err(|_| bad("real part"))?;
            let im: f64 = fields[2].parse().map_err(|_| bad("imaginary part"))?;
            modes.push((k, Complex64::new(re, im)));
        }
        Self::from_modes(modes)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    /// Inverse of [`TorusFunction::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, c) in self.modes() {
            let _ = writeln!(out, "{k} {:e} {:e}", c.re, c.im);
        }
        out
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let degree = self.degree.max(other.degree);
        let coeffs = (-(degree as i64)..=degree as i64)
            .map(|k| self.coeff(k) + other.coeff(k) * sign)
            .collect();
        Self::from_dense(degree, coeffs, self.strip.min(other.strip))
    }
}

fn symmetric(degree: usize, coeffs: &[Complex64]) -> bool {
    let scale: f64 = coeffs.iter().map(|c| c.norm()).sum::<f64>().max(f64::MIN_POSITIVE);
    (0..=degree).all(|k| (coeffs[degree + k] - coeffs[degree - k].conj()).norm() <= SYMMETRY_TOL * scale)
}

impl Add for &TorusFunction {
    type Output = TorusFunction;
    fn add(self, rhs: &TorusFunction) -> TorusFunction {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &TorusFunction {
    type Output = TorusFunction;
    fn sub(self, rhs: &TorusFunction) -> TorusFunction {
        self.combine(rhs, -1.0)
    }
}

impl Neg for &TorusFunction {
    type Output = TorusFunction;
    fn neg(self) -> TorusFunction {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Exact product; the degree of the result is the sum of the degrees.
impl Mul for &TorusFunction {
    type Output = TorusFunction;
    fn mul(self, rhs: &TorusFunction) -> TorusFunction {
        let degree = self.degree + rhs.degree;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        TorusFunction::from_dense(degree, coeffs, self.strip.min(rhs.strip))
    }
}
