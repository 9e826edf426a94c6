use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use mzsim_core::measure::*;
use mzsim_core::symplectic::mach_zehnder;
use mzsim_core::{GaussianState, WignerExpr};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn both(s: GaussianState) -> (GaussianState, WignerExpr) {
    let w = WignerExpr::from_gaussian(&s).unwrap();
    (s, w)
}

#[test]
fn intensity_examples() {
    for (state, mean, var) in [
        (GaussianState::vacuum(1).unwrap(), 0.0, 0.0),
        (GaussianState::coherent(2.0, 0.7).unwrap(), 4.0, 4.0),
        (GaussianState::thermal(4.0).unwrap(), 4.0, 20.0),
    ] {
        let (g, w) = both(state);
        for m in [intensity(&g, 1).unwrap(), intensity(&w, 1).unwrap()] {
            assert!(close(m.mean, mean, 1e-10) && close(m.variance, var, 1e-9), "{m:?}");
        }
    }
    let one = intensity(&WignerExpr::fock(3).unwrap(), 1).unwrap();
    assert!(close(one.mean, 3.0, 1e-12) && one.variance.abs() < 1e-9);
    assert!(intensity(&GaussianState::vacuum(1).unwrap(), 2).is_err());
}

#[test]
fn homodyne_examples() {
    let vac = GaussianState::vacuum(1).unwrap();
    for theta in [0.0, 0.8, 2.0] {
        let m = homodyne(&vac, 1, theta).unwrap();
        assert!(close(m.mean, 0.0, 1e-15) && close(m.variance, 0.5, 1e-15));
    }
    let (g, w) = both(GaussianState::coherent(1.0, 0.0).unwrap());
    assert!(close(homodyne(&g, 1, 0.0).unwrap().mean, SQRT_2, 1e-15));
    assert!(close(homodyne(&w, 1, 0.0).unwrap().mean, SQRT_2, 1e-14));
    // S(r, π) = diag(e^-r, e^r) squeezes the x quadrature.
    let r = 0.8f64;
    let (g, w) = both(GaussianState::squeezed_vacuum(r, PI).unwrap());
    assert!(close(homodyne(&g, 1, 0.0).unwrap().variance, (-2.0 * r).exp() / 2.0, 1e-14));
    assert!(close(homodyne(&w, 1, 0.0).unwrap().variance, (-2.0 * r).exp() / 2.0, 1e-13));
    assert!(close(homodyne(&g, 1, FRAC_PI_2).unwrap().variance, (2.0 * r).exp() / 2.0, 1e-13));
}

#[test]
fn parity_examples() {
    let vac = parity(&GaussianState::vacuum(1).unwrap(), 1).unwrap();
    assert!(close(vac.mean, 1.0, 1e-14) && vac.variance.abs() < 1e-10);
    let one = parity(&WignerExpr::fock(1).unwrap(), 1).unwrap();
    assert!(close(one.mean, -1.0, 1e-13));
    let (g, w) = both(GaussianState::thermal(2.0).unwrap());
    assert!(close(parity(&g, 1).unwrap().mean, 0.2, 1e-14));
    assert!(close(parity(&w, 1).unwrap().mean, 0.2, 1e-14));
    assert!(close(parity(&g, 1).unwrap().variance, 0.96, 1e-14));
}

#[test]
fn intensity_difference_examples() {
    let vv = intensity_difference(&GaussianState::vacuum(2).unwrap(), 1, 2).unwrap();
    assert!(vv.mean.abs() < 1e-15);
    assert!(intensity_difference(&GaussianState::vacuum(2).unwrap(), 1, 1).is_err());
    let alpha_sq = 2.25f64;
    let input = GaussianState::tensor(&[GaussianState::coherent(alpha_sq.sqrt(), 0.0).unwrap(), GaussianState::vacuum(1).unwrap()]).unwrap();
    let balanced = input.propagate(&mach_zehnder(FRAC_PI_2).unwrap()).unwrap();
    assert!(intensity_difference(&balanced, 1, 2).unwrap().mean.abs() < 1e-12);
    let closed = input.propagate(&mach_zehnder(0.0).unwrap()).unwrap();
    let d = intensity_difference(&closed, 1, 2).unwrap();
    assert!(close(d.mean.abs(), alpha_sq, 1e-12));
    // Coherent light split on two ports gives Poissonian difference noise.
    assert!(close(intensity_difference(&balanced, 1, 2).unwrap().variance, alpha_sq, 1e-10));
    let w = WignerExpr::from_gaussian(&balanced).unwrap();
    assert!(close(intensity_difference(&w, 1, 2).unwrap().variance, alpha_sq, 1e-9));
}

#[test]
fn click_examples() {
    assert!(click_probability(&GaussianState::vacuum(1).unwrap(), 1).unwrap().abs() < 1e-15);
    assert!(close(click_probability(&GaussianState::thermal(4.0).unwrap(), 1).unwrap(), 0.8, 1e-14));
    assert!(close(click_probability(&GaussianState::coherent(1.0, 0.0).unwrap(), 1).unwrap(), 1.0 - (-1f64).exp(), 1e-14));
    let c = click(&GaussianState::thermal(4.0).unwrap(), 1).unwrap();
    assert!(close(c.mean, 0.8, 1e-14) && close(c.variance, 0.16, 1e-14));
}

#[test]
fn scheme_dispatch() {
    let s = GaussianState::thermal(1.0).unwrap();
    assert_eq!(DetectionScheme::Parity { mode: 1 }.measure(&s).unwrap(), parity(&s, 1).unwrap());
    assert_eq!(DetectionScheme::IntensityDifference { mode_a: 1, mode_b: 2 }.name(), "difference_1_2");
    assert_eq!(DetectionScheme::Homodyne { mode: 2, angle: 0.0 }.modes(), vec![2]);
}
