use std::f64::consts::{FRAC_1_PI, PI, SQRT_2};

use mzsim_core::symplectic::{mach_zehnder, phase_shifter};
use mzsim_core::{CoreError, GaussianState, WignerExpr};

fn gauss(s: GaussianState) -> WignerExpr {
    WignerExpr::from_gaussian(&s).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn origin_values() {
    let vac = gauss(GaussianState::vacuum(1).unwrap());
    assert!(close(vac.evaluate(&[0.0, 0.0]).unwrap(), FRAC_1_PI, 1e-15));
    assert!(close(vac.evaluate(&[0.5, -0.3]).unwrap(), FRAC_1_PI * (-0.34f64).exp(), 1e-15));
    let th = gauss(GaussianState::thermal(2.0).unwrap());
    assert!(close(th.evaluate(&[0.0, 0.0]).unwrap(), 1.0 / (5.0 * PI), 1e-15));
    let one = WignerExpr::fock(1).unwrap();
    assert!(close(one.evaluate(&[0.0, 0.0]).unwrap(), -FRAC_1_PI, 1e-14));
}

#[test]
fn fock_expressions() {
    let zero = WignerExpr::fock(0).unwrap();
    let vac = gauss(GaussianState::vacuum(1).unwrap());
    for x in [(0.0, 0.0), (0.3, 1.1), (-1.4, 0.2)] {
        assert!(close(zero.evaluate(&[x.0, x.1]).unwrap(), vac.evaluate(&[x.0, x.1]).unwrap(), 1e-15));
    }
    assert!(close(WignerExpr::fock(3).unwrap().integral().unwrap(), 1.0, 1e-12));
    assert!(WignerExpr::fock(65).is_err());
}

#[test]
fn symplectic_action_matches_gaussian_propagation() {
    let input = GaussianState::tensor(&[GaussianState::coherent(1.3, 0.2).unwrap(), GaussianState::squeezed_vacuum(0.7, 0.0).unwrap()]).unwrap();
    let mzi = mach_zehnder(1.1).unwrap();
    let a = gauss(input.clone()).apply_symplectic(&mzi).unwrap();
    let b = gauss(input.propagate(&mzi).unwrap());
    assert_eq!(a.terms().len(), b.terms().len());
    for (ta, tb) in a.terms().iter().zip(b.terms()) {
        assert!((&ta.mean - &tb.mean).amax() < 1e-12);
        assert!((&ta.quad - &tb.quad).amax() < 1e-12);
        assert!(close(ta.weight, tb.weight, 1e-12));
    }
    let id = a.apply_symplectic(&mzsim_core::SymplecticTransform::identity(2)).unwrap();
    for x in [[0.1, 0.2, 0.3, 0.4], [1.0, -1.0, 0.5, 0.0]] {
        assert!(close(id.evaluate(&x).unwrap(), a.evaluate(&x).unwrap(), 1e-15));
    }
}

#[test]
fn single_photon_is_rotation_invariant() {
    let one = WignerExpr::fock(1).unwrap();
    for phi in [0.3, 1.2, 2.9] {
        let rotated = one.apply_symplectic(&phase_shifter(phi).unwrap()).unwrap();
        for x in [(0.0, 0.0), (0.4, 0.9), (-1.2, 0.3), (2.0, -0.5)] {
            assert!(close(rotated.evaluate(&[x.0, x.1]).unwrap(), one.evaluate(&[x.0, x.1]).unwrap(), 1e-13));
        }
    }
}

#[test]
fn moments() {
    let vac = gauss(GaussianState::vacuum(1).unwrap());
    assert!(close(vac.moment(&[2, 0]).unwrap(), 0.5, 1e-15));
    let coh = gauss(GaussianState::coherent(1.0, 0.0).unwrap());
    assert!(close(coh.moment(&[1, 0]).unwrap(), SQRT_2, 1e-15));
    let one = WignerExpr::fock(1).unwrap();
    let r2 = one.moment(&[2, 0]).unwrap() + one.moment(&[0, 2]).unwrap();
    assert!(close(r2, 3.0, 1e-13));
    assert!(close(0.5 * r2 - 0.5, 1.0, 1e-13));
}

#[test]
fn marginals() {
    let a = GaussianState::coherent(0.8, 0.4).unwrap();
    let b = GaussianState::thermal(1.5).unwrap();
    let joint = gauss(GaussianState::tensor(&[a.clone(), b]).unwrap());
    let m = joint.marginalize(2).unwrap();
    let want = gauss(a);
    for x in [(0.0, 0.0), (1.0, 0.5), (-0.7, 1.3)] {
        assert!(close(m.evaluate(&[x.0, x.1]).unwrap(), want.evaluate(&[x.0, x.1]).unwrap(), 1e-14));
    }
    assert!(close(joint.integral().unwrap(), m.integral().unwrap(), 1e-12));

    let r = 0.6f64;
    let tms = GaussianState::vacuum(2).unwrap().propagate(&mzsim_core::symplectic::two_mode_squeezer(r, 0.0).unwrap()).unwrap();
    let marginal = gauss(tms).marginalize(2).unwrap();
    let thermal = gauss(GaussianState::thermal(r.sinh().powi(2)).unwrap());
    for x in [(0.0, 0.0), (0.8, -0.2), (1.5, 1.5)] {
        assert!(close(marginal.evaluate(&[x.0, x.1]).unwrap(), thermal.evaluate(&[x.0, x.1]).unwrap(), 1e-14));
    }
    assert!(WignerExpr::fock(1).unwrap().marginalize(1).is_err());
}

#[test]
fn fock_projection() {
    let two = gauss(GaussianState::vacuum(2).unwrap());
    let (_, p) = two.project_fock(2, 0).unwrap();
    assert!(close(p, 1.0, 1e-12));
    let nbar = 1.7f64;
    let th = gauss(GaussianState::tensor(&[GaussianState::thermal(nbar).unwrap(), GaussianState::vacuum(1).unwrap()]).unwrap());
    for n in 0..6 {
        let (_, p) = th.project_fock(1, n).unwrap();
        assert!(close(p, nbar.powi(n as i32) / (nbar + 1.0).powi(n as i32 + 1), 1e-12), "n = {n}");
    }
    let one = WignerExpr::tensor(&[WignerExpr::fock(1).unwrap(), gauss(GaussianState::vacuum(1).unwrap())]).unwrap();
    assert!(close(one.project_fock(1, 1).unwrap().1, 1.0, 1e-12));
    assert!(matches!(two.project_fock(1, 1), Err(CoreError::ImprobableBranch { .. })));
}

#[test]
fn click_projection() {
    let pad = |s: GaussianState| gauss(GaussianState::tensor(&[s, GaussianState::vacuum(1).unwrap()]).unwrap());
    let th = pad(GaussianState::thermal(4.0).unwrap());
    let (_, click) = th.project_click(1).unwrap();
    let (_, none) = th.project_no_click(1).unwrap();
    assert!(close(click, 0.8, 1e-12));
    assert!(close(click + none, 1.0, 1e-10));
    let coh = pad(GaussianState::coherent(1.0, 0.0).unwrap());
    assert!(close(coh.project_click(1).unwrap().1, 1.0 - (-1f64).exp(), 1e-12));
    assert!(matches!(pad(GaussianState::vacuum(1).unwrap()).project_click(1), Err(CoreError::ImprobableBranch { .. })));
}

#[test]
fn generating_function_examples() {
    let vac = gauss(GaussianState::vacuum(1).unwrap());
    let one = WignerExpr::fock(1).unwrap();
    for l in [-0.5, 0.0, 0.3, 0.7, 1.0] {
        assert!(close(vac.generating_function(1, l).unwrap(), 1.0, 1e-12));
        assert!(close(one.generating_function(1, l).unwrap(), l, 1e-12));
    }
    assert!(vac.generating_function(1, -1.0).is_err());

    let th = gauss(GaussianState::thermal(4.0).unwrap());
    let dist = th.photon_number_distribution(1, 40).unwrap();
    for (n, p) in dist.probs.iter().enumerate() {
        assert!(close(*p, 4f64.powi(n as i32) / 5f64.powi(n as i32 + 1), 1e-10), "n = {n}");
    }
    assert!(dist.probs.iter().sum::<f64>() > 1.0 - 1e-3);
    for l in [0.0, 0.3, 0.7] {
        let series: f64 = dist.probs.iter().enumerate().map(|(n, p)| p * f64::powi(l, n as i32)).sum();
        assert!(close(series, th.generating_function(1, l).unwrap(), 1e-7));
    }
}

#[test]
fn purity_examples() {
    assert!(close(gauss(GaussianState::vacuum(1).unwrap()).purity().unwrap(), 1.0, 1e-12));
    assert!(close(gauss(GaussianState::thermal(2.0).unwrap()).purity().unwrap(), 0.2, 1e-12));
    assert!(close(WignerExpr::fock(2).unwrap().purity().unwrap(), 1.0, 1e-10));
}

#[test]
fn attenuation_matches_thermal_injection() {
    let s = GaussianState::tensor(&[GaussianState::coherent(1.1, 0.3).unwrap(), GaussianState::squeezed_vacuum(0.4, 0.9).unwrap()]).unwrap();
    let w = gauss(s.clone()).attenuate(2, 0.7, 0.6).unwrap();
    let g = gauss(s.inject_thermal(2, 0.6, 0.7).unwrap());
    for x in [[0.0, 0.0, 0.0, 0.0], [0.5, -0.2, 1.0, 0.3], [1.5, 0.1, -0.4, -1.0]] {
        assert!(close(w.evaluate(&x).unwrap(), g.evaluate(&x).unwrap(), 1e-13));
    }
}

#[test]
fn grid_export() {
    let mut out = Vec::new();
    gauss(GaussianState::vacuum(1).unwrap()).write_grid_csv(&mut out, (-1.0, 1.0, 3), (-1.0, 1.0, 3)).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,p,W");
    assert_eq!(lines.len(), 10);
}
