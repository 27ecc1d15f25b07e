//! Reference cocycles with closed-form Lyapunov exponents.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cocycle::{schrodinger, Cocycle, CocycleMap, Frequency, Mat2};
use crate::spectral::finite_spectrum;
use crate::torus::TorusFunction;

/// Almost Mathieu potential `2λ cos 2πx`.
pub fn amo_potential(lambda: f64) -> TorusFunction {
    TorusFunction::cosine(1, 2.0 * lambda)
}

/// Almost Mathieu cocycle at the golden frequency.
pub fn amo_cocycle(lambda: f64, energy: f64) -> Cocycle {
    Cocycle::new(Frequency::golden(), schrodinger(&amo_potential(lambda), energy))
}

/// Lyapunov exponent of the almost Mathieu cocycle on the complexified phase,
/// `max{L₀, ln λ + 2πε}` for `ε ≥ 0`, where `L₀` is the exponent at `ε = 0`
/// (equal to `max{0, ln λ}` on the spectrum).
pub fn amo_l(lambda: f64, eps: f64, l0: f64) -> f64 {
    l0.max(lambda.ln() + 2.0 * PI * eps)
}

/// Free Laplacian exponent `max{0, ln(|E|/2 + √(E²/4 − 1))}`.
pub fn free_laplacian_l(energy: f64) -> f64 {
    let e = energy.abs();
    if e <= 2.0 {
        return 0.0;
    }
    (e / 2.0 + (e * e / 4.0 - 1.0).sqrt()).ln().max(0.0)
}

/// Rotation by angle `2πkx`, a map of topological degree `k`.
pub fn rotation_map(k: i64) -> CocycleMap {
    let cos = TorusFunction::cosine(k, 1.0);
    let sin = TorusFunction::sine(k, 1.0);
    CocycleMap::new(cos.clone(), -&sin, sin, cos)
        .expect("rotations are unimodular")
        .with_degree(k)
}

/// Rotation cocycle of degree `k`; `L(α, A_ε) = 2π|k|ε` for every `α`.
pub fn rotation_cocycle(k: i64, alpha: Frequency) -> Cocycle {
    Cocycle::new(alpha, rotation_map(k))
}

/// Number of Taylor terms kept in [`diagonal_exponential`].
pub const EXP_TERMS: u32 = 40;

/// `diag(e^{λ(x)}, e^{−λ(x)})` with `λ(x) = e^{2πi q₀ x}`, truncated after
/// [`EXP_TERMS`] Taylor terms. The truncation is accurate to double precision
/// on `|Im z| ≤ 1/(4q₀)`, which is recorded as the strip.
pub fn diagonal_exponential(q0: u32) -> CocycleMap {
    let strip = 0.25 / q0 as f64;
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut fact = 1.0;
    for n in 0..=EXP_TERMS {
        if n > 0 {
            fact *= n as f64;
        }
        let c = 1.0 / fact;
        let k = (n * q0) as i64;
        plus.push((k, Complex64::new(c, 0.0)));
        minus.push((k, Complex64::new(if n % 2 == 0 { c } else { -c }, 0.0)));
    }
    let e_plus = TorusFunction::from_modes(plus).expect("distinct modes").with_strip(strip);
    let e_minus = TorusFunction::from_modes(minus).expect("distinct modes").with_strip(strip);
    let zero = TorusFunction::zero();
    CocycleMap::new(e_plus, zero.clone(), zero, e_minus).expect("determinant is one up to truncation")
}

/// Companion value for [`diagonal_exponential`] at `α = p/q`:
/// `(2/π) e^{−2π q₀ ε}` when `q | q₀`, zero otherwise.
pub fn diagonal_exponential_l(q0: u32, q: u64, eps: f64) -> f64 {
    if (q0 as u64).is_multiple_of(q) {
        2.0 / PI * (-2.0 * PI * q0 as f64 * eps).exp()
    } else {
        0.0
    }
}

/// An eigenvalue of the `n × n` truncation near `target` that sits inside a
/// cluster of eigenvalues: the four nearest neighbours (by index) lie within
/// `0.02`. Isolated eigenvalues, which are typically edge states living in a
/// gap, are skipped.
pub fn in_spectrum_energy(v: &TorusFunction, alpha: f64, target: f64, n: usize) -> f64 {
    let table = finite_spectrum(v, alpha, 0.0, n);
    let e = &table.energies;
    let mut best: Option<(f64, f64)> = None;
    for i in 2..e.len().saturating_sub(2) {
        if e[i + 2] - e[i - 2] > 0.02 {
            continue;
        }
        let d = (e[i] - target).abs();
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, e[i]));
        }
    }
    best.map(|(_, x)| x).unwrap_or(target)
}

/// A reference cocycle with its closed-form exponent.
#[derive(Debug, Clone)]
pub struct OracleCase {
    pub name: String,
    pub cocycle: Cocycle,
    pub eps: f64,
    pub expected_l: f64,
    pub expected_omega: Option<i64>,
    pub tolerance: f64,
    /// Where the expected value comes from.
    pub basis: &'static str,
}

/// The closed-form cases used to anchor the generic estimators.
pub fn oracle_suite() -> Vec<OracleCase> {
    let golden = Frequency::golden();
    let mut cases = Vec::new();
    for e in [2.5, 3.0, 4.5] {
        cases.push(OracleCase {
            name: format!("free laplacian E={e}"),
            cocycle: Cocycle::new(golden.clone(), schrodinger(&TorusFunction::zero(), e)),
            eps: 0.0,
            expected_l: free_laplacian_l(e),
            expected_omega: Some(0),
            tolerance: 1e-6,
            basis: "closed form ln(E/2 + sqrt(E^2/4 - 1))",
        });
    }
    for k in 0..=3 {
        cases.push(OracleCase {
            name: format!("rotation degree {k} at eps=0.1"),
            cocycle: rotation_cocycle(k, golden.clone()),
            eps: 0.1,
            expected_l: 2.0 * PI * k as f64 * 0.1,
            expected_omega: Some(k),
            tolerance: 1e-6,
            basis: "rotation by a complex angle is diagonalizable by a constant matrix",
        });
    }
    for eps in [0.0, 0.05, 0.1] {
        cases.push(OracleCase {
            name: format!("diagonal exponential q0=2 alpha=1/2 eps={eps}"),
            cocycle: Cocycle::new(Frequency::rational(1, 2).unwrap(), diagonal_exponential(2)),
            eps,
            expected_l: diagonal_exponential_l(2, 2, eps),
            expected_omega: None,
            tolerance: 1e-6,
            basis: "sum of lambda along a period-q orbit is q*lambda when q divides q0",
        });
    }
    cases.push(OracleCase {
        name: "hyperbolic constant diag(2, 1/2)".into(),
        cocycle: Cocycle::new(golden, CocycleMap::constant(Mat2::real(2.0, 0.0, 0.0, 0.5)).unwrap()),
        eps: 0.2,
        expected_l: 2f64.ln(),
        expected_omega: Some(0),
        tolerance: 1e-10,
        basis: "constant product",
    });
    cases
}
