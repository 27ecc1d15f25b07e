//! Finite-volume spectra, the integrated density of states and the
//! classification of energies.

use std::fmt;

use rayon::prelude::*;

use crate::acceleration::{acceleration_at, epsilon_profile, stratified_l, AccelerationOptions, LyapunovProfile};
use crate::cocycle::{schrodinger, Cocycle, Frequency};
use crate::error::{Error, Result};
use crate::hyperbolicity::SplittingOptions;
use crate::lyapunov::lyapunov_irrational;
use crate::torus::TorusFunction;

/// Sorted eigenvalues of the `n × n` Dirichlet truncation of
/// `(Hu)_k = u_{k+1} + u_{k−1} + v(θ + kα) u_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdsTable {
    pub energies: Vec<f64>,
    pub n: usize,
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples `i` and `i + 1`), by implicit QL with
/// Wilkinson shifts. Returned in ascending order.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 100, "QL iteration did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    d
}

/// Spectrum of the `n × n` truncation with phase `θ`.
pub fn finite_spectrum(v: &TorusFunction, alpha: f64, theta: f64, n: usize) -> IdsTable {
    let diag: Vec<f64> = (0..n)
        .map(|k| v.eval_real((theta + k as f64 * alpha).rem_euclid(1.0)).re)
        .collect();
    let off = vec![1.0; n.saturating_sub(1)];
    IdsTable {
        energies: tridiagonal_eigenvalues(&diag, &off),
        n,
    }
}

/// Fraction of eigenvalues `≤ e`.
pub fn ids(table: &IdsTable, e: f64) -> f64 {
    if table.energies.is_empty() {
        return 0.0;
    }
    table.energies.partition_point(|&x| x <= e) as f64 / table.energies.len() as f64
}

/// `max_E |L(E) − (1/N) Σ_j ln |λ_j − E||` over `energies`.
pub fn thouless_residual(
    v: &TorusFunction,
    alpha: f64,
    energies: &[f64],
    n: usize,
    opts: &AccelerationOptions,
) -> Result<f64> {
    let table = finite_spectrum(v, alpha, 0.0, n);
    let freq = Frequency::irrational(alpha)?;
    let rows = energies
        .par_iter()
        .map(|&e| {
            let c = Cocycle::new(freq.clone(), schrodinger(v, e));
            let l = lyapunov_irrational(&c, 0.0, &opts.lyapunov)?.value;
            let log_potential =
                table.energies.iter().map(|x| (x - e).abs().ln()).sum::<f64>() / table.energies.len() as f64;
            Ok((l - log_potential).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(rows.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stratum {
    UniformlyHyperbolic,
    Supercritical,
    Subcritical,
    Critical,
}

impl Stratum {
    pub fn from_l_omega(l: f64, omega: i64, threshold: f64) -> Stratum {
        match (l > threshold, omega == 0) {
            (true, true) => Stratum::UniformlyHyperbolic,
            (true, false) => Stratum::Supercritical,
            (false, true) => Stratum::Subcritical,
            (false, false) => Stratum::Critical,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Stratum::UniformlyHyperbolic => "UniformlyHyperbolic",
            Stratum::Supercritical => "Supercritical",
            Stratum::Subcritical => "Subcritical",
            Stratum::Critical => "Critical",
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tunables shared by classification and scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub acceleration: AccelerationOptions,
    pub splitting: SplittingOptions,
    /// `L` above this counts as positive.
    pub l_threshold: f64,
    /// `L` in this band is flagged as borderline.
    pub borderline: (f64, f64),
    /// Evidence profile on `[0, evidence_eps]`.
    pub evidence_eps: f64,
    pub evidence_points: usize,
    /// `δ` for the stratified fit in scans.
    pub stratum_delta: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            acceleration: AccelerationOptions::default(),
            splitting: SplittingOptions::default(),
            l_threshold: 1e-3,
            borderline: (5e-4, 2e-3),
            evidence_eps: 0.1,
            evidence_points: 6,
            stratum_delta: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyClass {
    pub energy: f64,
    pub tag: Stratum,
    pub omega: i64,
    pub l: f64,
    /// Distance of the fitted acceleration from `omega`.
    pub defect: f64,
    pub borderline: bool,
    pub evidence: LyapunovProfile,
}

fn schrodinger_cocycle(v: &TorusFunction, alpha: f64, e: f64) -> Result<Cocycle> {
    if !v.is_real_symmetric() {
        return Err(Error::InvalidInput("potential must be real".into()));
    }
    Ok(Cocycle::new(Frequency::irrational(alpha)?, schrodinger(v, e)))
}

/// Classify `E` by `L` at `ε = 0` and the right acceleration there.
pub fn classify_energy(v: &TorusFunction, alpha: f64, e: f64, settings: &Settings) -> Result<EnergyClass> {
    let c = schrodinger_cocycle(v, alpha, e)?;
    classify_cocycle(&c, e, settings)
}

fn classify_cocycle(c: &Cocycle, e: f64, settings: &Settings) -> Result<EnergyClass> {
    let l = lyapunov_irrational(c, 0.0, &settings.acceleration.lyapunov)?.value;
    let acc = acceleration_at(c, 0.0, &settings.acceleration)?;
    let evidence = epsilon_profile(
        c,
        0.0,
        settings.evidence_eps,
        settings.evidence_points,
        &settings.acceleration,
    )?;
    let (lo, hi) = settings.borderline;
    Ok(EnergyClass {
        energy: e,
        tag: Stratum::from_l_omega(l, acc.omega, settings.l_threshold),
        omega: acc.omega,
        l,
        defect: acc.defect,
        borderline: (lo..=hi).contains(&l),
        evidence,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub energy: f64,
    pub l: f64,
    pub omega: i64,
    pub defect: f64,
    pub tag: Stratum,
    pub borderline: bool,
    /// The tag differs from a grid neighbour's.
    pub boundary: bool,
    /// `|L_{δ,ω} − L(0)|` on the detected stratum; `NaN` when no affine piece
    /// of slope `ω` was found near zero.
    pub stratum_residual: f64,
}

/// Classify every energy in `energies`; rows come back in input order.
pub fn scan(v: &TorusFunction, alpha: f64, energies: &[f64], settings: &Settings) -> Result<Vec<ScanRow>> {
    if !v.is_real_symmetric() {
        return Err(Error::InvalidInput("potential must be real".into()));
    }
    let freq = Frequency::irrational(alpha)?;
    let mut rows = energies
        .par_iter()
        .map(|&e| {
            let c = Cocycle::new(freq.clone(), schrodinger(v, e));
            let class = classify_cocycle(&c, e, settings)?;
            let residual = match stratified_l(&c, class.omega, settings.stratum_delta, &settings.acceleration) {
                Ok(s) => (s.value - class.l).abs(),
                Err(Error::WrongStratum(_)) => f64::NAN,
                Err(err) => return Err(err),
            };
            Ok(ScanRow {
                energy: e,
                l: class.l,
                omega: class.omega,
                defect: class.defect,
                tag: class.tag,
                borderline: class.borderline,
                boundary: false,
                stratum_residual: residual,
            })
        })
        .collect::<Result<Vec<ScanRow>>>()?;
    let tags: Vec<Stratum> = rows.iter().map(|r| r.tag).collect();
    for (i, row) in rows.iter_mut().enumerate() {
        let left = i > 0 && tags[i - 1] != tags[i];
        let right = i + 1 < tags.len() && tags[i + 1] != tags[i];
        row.boundary = left || right;
    }
    Ok(rows)
}
