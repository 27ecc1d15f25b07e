//! Acceptance criteria. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sl2_core::hyperbolicity::coefficients_from_basis;
use sl2_core::lyapunov::lyapunov_rational_refined;
use sl2_core::oracles::{amo_potential, diagonal_exponential, in_spectrum_energy, rotation_cocycle};
use sl2_core::{
    acceleration_at, conjugation, derivative_coefficients, directional_derivative, epsilon_profile, finite_spectrum,
    lyapunov, lyapunov_ergodic, lyapunov_from_trace, lyapunov_irrational, lyapunov_rational, potential_gradient,
    schrodinger, splitting, thouless_residual, trace_fourier_profile, AccelerationOptions, Cocycle, Complex64,
    Frequency, LyapunovOptions, Mat2, SplittingOptions, TorusFunction,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn free_closed_form(e: f64) -> f64 {
    let e = e.abs();
    if e <= 2.0 {
        0.0
    } else {
        (0.5 * (e + (e * e - 4.0).sqrt())).ln()
    }
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn amo(lambda: f64, e: f64) -> Cocycle {
    Cocycle::new(Frequency::golden(), schrodinger(&amo_potential(lambda), e))
}

/// Energy in the finite-volume spectrum, verified against the eigenvalues.
fn spectrum_energy(lambda: f64) -> f64 {
    let v = amo_potential(lambda);
    let e = in_spectrum_energy(&v, golden(), 0.3, 4096);
    let table = finite_spectrum(&v, golden(), 0.0, 4096);
    let gap = table.energies.iter().map(|x| (x - e).abs()).fold(f64::INFINITY, f64::min);
    assert!(gap <= 1e-3, "E = {e} is {gap} from the spectrum");
    e
}

fn random_potential(rng: &mut ChaCha8Rng, degree: i64, amp: f64) -> TorusFunction {
    let mut v = TorusFunction::zero();
    for k in 1..=degree {
        v = &v + &TorusFunction::cosine(k, rng.gen_range(-amp..amp));
        v = &v + &TorusFunction::sine(k, rng.gen_range(-amp..amp));
    }
    v
}

fn sup_abs(v: &TorusFunction) -> f64 {
    (0..512).map(|i| v.eval_real(i as f64 / 512.0).norm()).fold(0.0, f64::max)
}

fn c1() -> Outcome {
    let opts = LyapunovOptions::default();
    let c = Cocycle::new(Frequency::golden(), schrodinger(&TorusFunction::zero(), 3.0));
    let l = lyapunov_irrational(&c, 0.0, &opts).map_err(|e| e.to_string())?.value;
    let err3 = (l - ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs();
    let mut sup: f64 = 0.0;
    for i in 0..40 {
        let e = 2.1 + 3.9 * i as f64 / 39.0;
        let c = Cocycle::new(Frequency::golden(), schrodinger(&TorusFunction::zero(), e));
        let l = lyapunov_irrational(&c, 0.0, &opts).map_err(|e| e.to_string())?.value;
        sup = sup.max((l - free_closed_form(e)).abs());
    }
    check(
        err3 <= 1e-6 && sup <= 1e-5,
        format!("|L(3) - ln((3+√5)/2)| = {err3:.2e} (≤ 1e-6), sup on [2.1, 6] = {sup:.2e} (≤ 1e-5)"),
    )
}

fn c2() -> Outcome {
    let e = spectrum_energy(2.0);
    let c = amo(2.0, e);
    let opts = AccelerationOptions::default();
    let l = lyapunov(&c, 0.0, &opts.lyapunov).map_err(|e| e.to_string())?;
    let p = epsilon_profile(&c, 0.0, 0.3, 13, &opts).map_err(|e| e.to_string())?;
    let prof = p
        .eps
        .iter()
        .zip(&p.values)
        .map(|(&x, &y)| (y - 2f64.ln().max(2f64.ln() + 2.0 * PI * x)).abs())
        .fold(0.0, f64::max);
    let a = acceleration_at(&c, 0.0, &opts).map_err(|e| e.to_string())?;
    check(
        (l - 2f64.ln()).abs() <= 2e-2 && prof <= 2e-2 && a.omega == 1 && a.defect < 0.05,
        format!(
            "E = {e:.6}: L = {l:.6} (ln 2 ± 2e-2), profile error {prof:.2e} (≤ 2e-2), ω = {} defect {:.2e}",
            a.omega, a.defect
        ),
    )
}

fn c3() -> Outcome {
    let opts = AccelerationOptions::default();
    let e_sub = spectrum_energy(0.5);
    let c = amo(0.5, e_sub);
    let l_sub = lyapunov(&c, 0.0, &opts.lyapunov).map_err(|e| e.to_string())?;
    let w_sub = acceleration_at(&c, 0.0, &opts).map_err(|e| e.to_string())?.omega;
    let e_crit = spectrum_energy(1.0);
    let c = amo(1.0, e_crit);
    let l_crit = lyapunov(&c, 0.0, &opts.lyapunov).map_err(|e| e.to_string())?;
    let w_crit = acceleration_at(&c, 0.0, &opts).map_err(|e| e.to_string())?.omega;
    check(
        l_sub <= 2e-3 && w_sub == 0 && l_crit <= 5e-3 && w_crit == 1,
        format!("λ=1/2: L = {l_sub:.2e}, ω = {w_sub}; λ=1: L = {l_crit:.2e}, ω = {w_crit}"),
    )
}

fn c4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let opts = AccelerationOptions::default();
    let (mut good, mut flagged, mut explained) = (0, 0, 0);
    for _ in 0..50 {
        let degree = rng.gen_range(1..=3);
        let v = random_potential(&mut rng, degree, 1.5);
        let e = rng.gen_range(-4.0..4.0);
        let eps0 = rng.gen_range(0.05..0.2);
        let c = Cocycle::new(Frequency::golden(), schrodinger(&v, e));
        let a = acceleration_at(&c, eps0, &opts).map_err(|e| e.to_string())?;
        if a.defect <= 0.05 {
            good += 1;
            continue;
        }
        flagged += 1;
        let p = epsilon_profile(&c, eps0 - 0.03, eps0 + 0.03, 25, &opts).map_err(|e| e.to_string())?;
        if p.breakpoints(0.05).iter().any(|b| (b - eps0).abs() <= 0.02) {
            explained += 1;
        }
    }
    check(
        good >= 45 && explained == flagged,
        format!("{good}/50 with defect ≤ 0.05; {explained}/{flagged} flagged points near a breakpoint"),
    )
}

fn c5() -> Outcome {
    let opts = AccelerationOptions::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for k in 0..=3 {
        let a = acceleration_at(&rotation_cocycle(k, Frequency::golden()), 0.0, &opts).map_err(|e| e.to_string())?;
        ok &= a.omega == k && a.defect < 0.05;
        notes.push(format!("k={k}: ω={} defect {:.1e}", a.omega, a.defect));
    }
    check(ok, notes.join(", "))
}

fn c6() -> Outcome {
    let opts = LyapunovOptions::default();
    let half = Cocycle::new(Frequency::rational(1, 2).unwrap(), diagonal_exponential(2));
    let fifths = Cocycle::new(Frequency::rational(3, 5).unwrap(), diagonal_exponential(2));
    let mut worst: f64 = 0.0;
    let mut zero: f64 = 0.0;
    for eps in [0.0, 0.05, 0.1] {
        let l = lyapunov_rational_refined(&half, eps, &opts).map_err(|e| e.to_string())?;
        worst = worst.max((l - 2.0 / PI * (-4.0 * PI * eps).exp()).abs());
        zero = zero.max(lyapunov_rational_refined(&fifths, eps, &opts).map_err(|e| e.to_string())?);
    }
    check(
        worst <= 1e-6 && zero <= 1e-6,
        format!("α=1/2: max error {worst:.2e} (≤ 1e-6); α=3/5: max L {zero:.2e}"),
    )
}

/// Uniformly hyperbolic Schrödinger cocycles: energies beyond the reach of the
/// potential, at ε = 0 and ε = 0.05, plus the almost Mathieu cocycle inside its
/// spectrum at ε = 0.15.
fn uh_suite() -> Vec<(Cocycle, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::new();
    for i in 0..9 {
        let degree = rng.gen_range(1..=2);
        let v = random_potential(&mut rng, degree, 0.8);
        let margin = 2.0 + sup_abs(&v) + rng.gen_range(0.5..2.0);
        let e = if rng.gen_bool(0.5) { margin } else { -margin };
        out.push((Cocycle::new(Frequency::golden(), schrodinger(&v, e)), if i % 2 == 0 { 0.0 } else { 0.05 }));
    }
    out.push((amo(2.0, spectrum_energy(2.0)), 0.15));
    out
}

fn c7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let fine = LyapunovOptions {
        refine_tol: 1e-13,
        ..LyapunovOptions::default()
    };
    let (mut fd_err, mut gauge, mut mean_ln): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (c, eps) in uh_suite() {
        let sp = splitting(&c, eps, 50, 256).map_err(|e| e.to_string())?;
        let dc = derivative_coefficients(&sp).map_err(|e| e.to_string())?;
        let mut w: Vec<TorusFunction> = Vec::new();
        for _ in 0..3 {
            let modes = (-1..=1).map(|k| (k, Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))));
            w.push(TorusFunction::from_modes(modes).unwrap());
        }
        let w: [TorusFunction; 3] = w.try_into().unwrap();
        let d = directional_derivative(&dc, &w).map_err(|e| e.to_string())?;
        let t = 1e-4;
        let lp = lyapunov(&c.with_map(c.map.perturb(&w, t)), eps, &fine).map_err(|e| e.to_string())?;
        let lm = lyapunov(&c.with_map(c.map.perturb(&w, -t)), eps, &fine).map_err(|e| e.to_string())?;
        let fd = (lp - lm) / (2.0 * t);
        fd_err = fd_err.max((d - fd).abs() / d.abs().max(1e-2));
        for j in 0..sp.grid.len() {
            let b = sp.basis(j);
            let s = Complex64::from_polar(rng.gen_range(0.2..5.0), rng.gen_range(0.0..2.0 * PI));
            let scaled = Mat2::new(b.a * s, b.b / s, b.c * s, b.d / s);
            let (q, r) = (coefficients_from_basis(&b), coefficients_from_basis(&scaled));
            for i in 0..3 {
                gauge = gauge.max((q[i] - r[i]).norm() / q[i].norm().max(1.0));
            }
        }
        let cj = conjugation(&sp).map_err(|e| e.to_string())?;
        let l = lyapunov(&c, eps, &fine).map_err(|e| e.to_string())?;
        mean_ln = mean_ln.max((cj.mean_ln_lambda - l).abs());
    }
    check(
        fd_err <= 1e-4 && gauge <= 1e-12 && mean_ln <= 1e-5,
        format!("finite-difference rel. error {fd_err:.2e} (≤ 1e-4), gauge {gauge:.2e} (≤ 1e-12), ∫ln|λ| - L {mean_ln:.2e} (≤ 1e-5)"),
    )
}

fn c8() -> Outcome {
    let mut worst: f64 = 0.0;
    for (c, eps) in uh_suite() {
        let sp = splitting(&c, eps, 50, 256).map_err(|e| e.to_string())?;
        let dc = derivative_coefficients(&sp).map_err(|e| e.to_string())?;
        let alpha = c.alpha.value();
        for (j, &x) in sp.grid.iter().enumerate() {
            let q3 = coefficients_from_basis(&sp.basis_at(x - alpha))[2];
            worst = worst.max((dc.samples[1][j] + q3).norm());
        }
    }
    check(worst <= 1e-8, format!("max |q2(x) + q3(x-α)| = {worst:.2e} (≤ 1e-8)"))
}

/// Witness recorded on first computation.
const WITNESS_ANCHOR: f64 = 0.33655775882288935;

fn c9() -> Outcome {
    let c = amo(2.0, spectrum_energy(2.0));
    let g = potential_gradient(&c, 1, 0.15, 3, &SplittingOptions::default(), &AccelerationOptions::default())
        .map_err(|e| e.to_string())?;
    check(
        g.witness > 0.01 && (g.witness - WITNESS_ANCHOR).abs() <= 1e-6,
        format!("witness {:.8} (> 0.01; anchor {WITNESS_ANCHOR:.8})", g.witness),
    )
}

fn c10() -> Outcome {
    let opts = AccelerationOptions::default();
    let mut grid: Vec<f64> = (0..10).map(|i| 2.2 + 3.8 * i as f64 / 9.0).collect();
    grid.extend(grid.clone().iter().map(|e| -e));
    let v = TorusFunction::zero();
    let r = |n| thouless_residual(&v, golden(), &grid, n, &opts).map_err(|e| e.to_string());
    let (r1, r2, r3) = (r(2048)?, r(4096)?, r(8192)?);
    let (q1, q2) = (r1 / r2, r2 / r3);
    check(
        r2 <= 5e-3 && (1.0..=4.0).contains(&q1) && (1.0..=4.0).contains(&q2),
        format!("residual N=2048 {r1:.2e}, 4096 {r2:.2e} (≤ 5e-3), 8192 {r3:.2e}; ratios {q1:.2}, {q2:.2} (in [1, 4])"),
    )
}

fn c11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let opts = LyapunovOptions::default();
    let (mut trace_ok, mut trace_worst) = (true, 0.0f64);
    let mut ergodic_worst: f64 = 0.0;
    for _ in 0..8 {
        let degree = rng.gen_range(1..=3);
        let v = random_potential(&mut rng, degree, 1.5);
        let e = rng.gen_range(-4.0..4.0);
        let map = schrodinger(&v, e);
        for (p, q) in [(233, 377), (377, 610), (610, 987)] {
            let c = Cocycle::new(Frequency::rational(p, q).unwrap(), map.clone());
            let tp = trace_fourier_profile(&c, 64).map_err(|e| e.to_string())?;
            for delta in [0.0, 0.1] {
                let direct = lyapunov_rational(&c, delta, 4096).map_err(|e| e.to_string())?;
                let model = lyapunov_from_trace(&tp, delta).map_err(|e| e.to_string())?;
                let err = (direct - model).abs();
                trace_ok &= err <= 5e-3f64.max(10.0 * (-(q as f64)).exp());
                trace_worst = trace_worst.max(err);
            }
        }
        let c = Cocycle::new(Frequency::golden(), map);
        for delta in [0.0, 0.1] {
            let erg = lyapunov_ergodic(&c, delta, 4000, 32).map_err(|e| e.to_string())?;
            let irr = lyapunov_irrational(&c, delta, &opts).map_err(|e| e.to_string())?.value;
            ergodic_worst = ergodic_worst.max((erg - irr).abs());
        }
    }
    check(
        trace_ok && ergodic_worst <= 1e-2,
        format!("rational vs trace model max {trace_worst:.2e} (≤ 5e-3); ergodic vs irrational max {ergodic_worst:.2e} (≤ 1e-2)"),
    )
}

fn c12() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |threads: usize| -> Result<Vec<u8>, String> {
        let out = dir.path().join(format!("scan{threads}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_sl2"))
            .args(["classify", "--lambda", "2", "--e_min", "-5", "--e_max", "5", "--e_points", "11"])
            .args(["--threads", &threads.to_string(), "--out"])
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("sl2 exited with {status}"));
        }
        std::fs::read(&out).map_err(|e| e.to_string())
    };
    let (a, b) = (run(1)?, run(3)?);
    check(a == b && !a.is_empty(), format!("{} bytes, identical for 1 and 3 threads: {}", a.len(), a == b))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("free Laplacian", c1),
        ("almost Mathieu supercritical", c2),
        ("almost Mathieu subcritical and critical", c3),
        ("acceleration quantization", c4),
        ("rotation degrees", c5),
        ("diagonal exponential at rationals", c6),
        ("derivative formula", c7),
        ("Schrödinger symmetry of q2, q3", c8),
        ("submersion witness", c9),
        ("Thouless formula", c10),
        ("cross-estimator agreement", c11),
        ("scan determinism", c12),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{secs:.1}s]", i + 1)
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
