//! Invariant splittings, conjugations and derivative coefficients on
//! uniformly hyperbolic cocycles.

use sl2_core::hyperbolicity::projective_distance;
use sl2_core::oracles::{amo_cocycle, amo_potential, in_spectrum_energy};
use sl2_core::{
    conjugation, derivative_coefficients, is_uniformly_hyperbolic, lyapunov, potential_gradient, schrodinger,
    splitting, AccelerationOptions, Cocycle, Complex64, Error, Frequency, LyapunovOptions, SplittingOptions,
    TorusFunction,
};

fn far_energy() -> Cocycle {
    let v = &TorusFunction::cosine(1, 1.0) + &TorusFunction::sine(2, 0.5);
    Cocycle::new(Frequency::golden(), schrodinger(&v, 4.0))
}

#[test]
fn splitting_is_invariant() {
    let c = far_energy();
    let sp = splitting(&c, 0.0, 50, 128).unwrap();
    assert!(sp.inv_residual <= 1e-6 && sp.drift <= 1e-6);
    for (j, &x) in sp.grid.iter().enumerate() {
        let a = sp.cocycle().map.eval_real(x);
        assert!(projective_distance(&a.apply(sp.u[j]), &sp.u_next[j]) < 1e-6);
        assert!(projective_distance(&a.apply(sp.s[j]), &sp.s_next[j]) < 1e-6);
    }
}

#[test]
fn lambda_integrates_to_l() {
    let c = far_energy();
    let sp = splitting(&c, 0.0, 50, 128).unwrap();
    let conj = conjugation(&sp).unwrap();
    let l = lyapunov(&c, 0.0, &LyapunovOptions::default()).unwrap();
    assert!((conj.mean_ln_lambda - l).abs() < 1e-5);
    assert!(conj.off_diagonal < 1e-6);
    assert_eq!(conj.winding, 0);
}

#[test]
fn angle_controls_coefficients() {
    // small angles between u and s force a large coefficient
    for e in [3.0, 4.0, 6.0] {
        let v = TorusFunction::cosine(1, 1.5);
        let c = Cocycle::new(Frequency::golden(), schrodinger(&v, e));
        let sp = splitting(&c, 0.0, 50, 128).unwrap();
        let dc = derivative_coefficients(&sp).unwrap();
        let big = dc
            .samples
            .iter()
            .flatten()
            .map(|z: &Complex64| z.norm())
            .fold(0.0, f64::max);
        let probe = sp.min_angle * big;
        assert!((0.1..=10.0).contains(&probe), "E = {e}: {probe}");
    }
}

#[test]
fn certificates_agree_off_spectrum() {
    let cert = is_uniformly_hyperbolic(
        &far_energy(),
        0.0,
        &SplittingOptions::default(),
        &AccelerationOptions::default(),
    )
    .unwrap();
    assert!(cert.by_splitting && cert.by_l_and_omega && cert.agree);
    assert_eq!(cert.omega, 0);
}

#[test]
fn in_spectrum_needs_complexification() {
    let e = in_spectrum_energy(&amo_potential(2.0), Frequency::golden().value(), 0.3, 2000);
    let c = amo_cocycle(2.0, e);
    assert!(matches!(splitting(&c, 0.0, 50, 128), Err(Error::NotHyperbolic { .. })));
    let cert =
        is_uniformly_hyperbolic(&c, 0.15, &SplittingOptions::default(), &AccelerationOptions::default()).unwrap();
    assert!(cert.by_splitting && cert.agree);
    assert_eq!(cert.omega, 1);
}

#[test]
fn gradient_on_wrong_stratum() {
    let r = potential_gradient(
        &far_energy(),
        1,
        0.05,
        2,
        &SplittingOptions::default(),
        &AccelerationOptions::default(),
    );
    assert!(matches!(r, Err(Error::WrongStratum(_))));
}
