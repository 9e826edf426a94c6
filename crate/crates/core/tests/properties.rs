use std::f64::consts::PI;

use mzsim_core::estimation::*;
use mzsim_core::gaussian::validate_covariance;
use mzsim_core::herald::{failure_branch, subtract_photons, add_photons_bs};
use mzsim_core::measure::*;
use mzsim_core::symplectic::*;
use mzsim_core::{CoreResult, GaussianState, LossSpec, SymplecticTransform, WignerExpr};
use proptest::prelude::*;

fn cases() -> ProptestConfig {
    ProptestConfig { cases: 200, ..ProptestConfig::default() }
}

/// A random two-mode gate chain.
fn gate() -> impl Strategy<Value = SymplecticTransform> {
    prop_oneof![
        (0.0..=1.0f64).prop_map(|t| beam_splitter(t).unwrap()),
        (-PI..PI).prop_map(|p| symmetric_phase_shifter(p).unwrap()),
        (-PI..PI).prop_map(|p| mach_zehnder(p).unwrap()),
        (0.0..1.2f64, -PI..PI).prop_map(|(r, th)| two_mode_squeezer(r, th).unwrap()),
        (0.0..1.2f64, -PI..PI, 1usize..=2).prop_map(|(r, th, m)| squeezer(r, th).unwrap().embed(&[m], 2).unwrap()),
        (0.0..2.0f64, -PI..PI, 1usize..=2).prop_map(|(a, th, m)| displacement(a, th).unwrap().embed(&[m], 2).unwrap()),
        (-PI..PI, 1usize..=2).prop_map(|(p, m)| phase_shifter(p).unwrap().embed(&[m], 2).unwrap()),
    ]
}

fn chain() -> impl Strategy<Value = SymplecticTransform> {
    prop::collection::vec(gate(), 1..6).prop_map(|gs| gs.iter().fold(SymplecticTransform::identity(2), |acc, g| compose(g, &acc).unwrap()))
}

fn single_mode_state() -> impl Strategy<Value = GaussianState> {
    prop_oneof![
        (0.0..1.5f64, -PI..PI).prop_map(|(a, th)| GaussianState::coherent(a, th).unwrap()),
        (0.0..2.0f64).prop_map(|n| GaussianState::thermal(n).unwrap()),
        (0.0..0.8f64, -PI..PI).prop_map(|(r, th)| GaussianState::squeezed_vacuum(r, th).unwrap()),
    ]
}

fn pure_single_mode_state() -> impl Strategy<Value = GaussianState> {
    prop_oneof![
        (0.0..1.5f64, -PI..PI).prop_map(|(a, th)| GaussianState::coherent(a, th).unwrap()),
        (0.0..0.8f64, -PI..PI).prop_map(|(r, th)| GaussianState::squeezed_vacuum(r, th).unwrap()),
    ]
}

fn coh_sqz(alpha_sq: f64, r: f64, phi: f64) -> CoreResult<GaussianState> {
    GaussianState::tensor(&[GaussianState::coherent(alpha_sq.sqrt(), 0.0)?, GaussianState::squeezed_vacuum(r, 0.0)?])?.propagate(&mach_zehnder(phi)?)
}

proptest! {
    #![proptest_config(cases())]

    #[test]
    fn gate_chains_stay_symplectic(f in chain()) {
        prop_assert!(f.symplectic_defect() < 1e-9, "defect {}", f.symplectic_defect());
        prop_assert!((f.matrix.determinant() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn composition_is_associative(a in chain(), b in chain(), c in chain()) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        let scale = left.matrix.amax().max(1.0);
        prop_assert!((&left.matrix - &right.matrix).amax() < 1e-11 * scale);
        prop_assert!((left.shift_or_zero() - right.shift_or_zero()).amax() < 1e-11 * scale);
    }

    #[test]
    fn propagation_keeps_covariance_physical(a in single_mode_state(), b in single_mode_state(), f in chain()) {
        let s = GaussianState::tensor(&[a, b]).unwrap().propagate(&f).unwrap();
        prop_assert!(validate_covariance(&s.cov).is_ok());
        let lossy = s.apply_loss(&LossSpec::new(0.3, 0.9).unwrap()).unwrap();
        prop_assert!(validate_covariance(&lossy.cov).is_ok());
    }

    #[test]
    fn loss_mixes_pure_states(a in pure_single_mode_state(), b in pure_single_mode_state(), f in chain(), l in 0.01..0.9f64) {
        let s = GaussianState::tensor(&[a, b]).unwrap().propagate(&f).unwrap();
        prop_assert!((s.purity() - 1.0).abs() < 1e-9);
        let after = s.apply_loss(&LossSpec::new(l, 1.0).unwrap()).unwrap().purity();
        prop_assert!(after <= 1.0 + 1e-12);
        // Coherent light stays pure under loss; any squeezing is mixed by it.
        if (&s.cov - nalgebra::DMatrix::<f64>::identity(4, 4)).amax() > 1e-3 {
            prop_assert!(after < 1.0 - 1e-12);
        }
    }

    #[test]
    fn heralded_states_are_normalized_distributions(a in single_mode_state(), t in 0.5..0.98f64, m in 1usize..=2) {
        let w = WignerExpr::from_gaussian(&a).unwrap();
        let branches = [subtract_photons(&w, 1, m, t), failure_branch(&w, 1, m, t), add_photons_bs(&w, 1, m, t)];
        for b in branches.into_iter().flatten() {
            prop_assert!((-1e-9..=1.0 + 1e-9).contains(&b.probability));
            prop_assert!((b.state.integral().unwrap() - 1.0).abs() < 1e-9);
            let d = b.state.photon_number_distribution(1, 30).unwrap();
            prop_assert!(d.probs.iter().all(|p| *p > -1e-9), "{:?}", d.probs);
            prop_assert!(d.probs.iter().sum::<f64>() <= 1.0 + 1e-9);
            let pm = parity(&b.state, 1).unwrap().mean;
            prop_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&pm));
        }
    }

    #[test]
    fn parity_equals_alternating_photon_sum(a in single_mode_state(), t in 0.6..0.95f64) {
        let w = subtract_photons(&WignerExpr::from_gaussian(&a).unwrap(), 1, 1, t);
        if let Ok(h) = w {
            let d = h.state.photon_number_distribution(1, 60).unwrap();
            if d.tail < 1e-10 {
                let alt: f64 = d.probs.iter().enumerate().map(|(n, p)| if n % 2 == 0 { *p } else { -*p }).sum();
                prop_assert!((PI * h.state.evaluate(&[0.0, 0.0]).unwrap() - alt).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn measurement_variances_are_nonnegative(a in single_mode_state(), b in single_mode_state(), f in chain(), th in -PI..PI) {
        let s = GaussianState::tensor(&[a, b]).unwrap().propagate(&f).unwrap();
        for scheme in [
            DetectionScheme::Intensity { mode: 1 },
            DetectionScheme::Homodyne { mode: 2, angle: th },
            DetectionScheme::Parity { mode: 1 },
            DetectionScheme::IntensityDifference { mode_a: 1, mode_b: 2 },
            DetectionScheme::Click { mode: 2 },
        ] {
            let m = scheme.measure(&s).unwrap();
            prop_assert!(m.variance >= 0.0 && m.variance.is_finite());
        }
        let p = parity(&s, 2).unwrap().mean;
        prop_assert!((-1.0..=1.0 + 1e-12).contains(&p));
    }

    #[test]
    fn phase_variance_respects_the_quantum_bound(alpha_sq in 1.0..50.0f64, r in 0.0..1.2f64, phi in 0.3..2.8f64, l in 0.0..0.5f64) {
        let loss = LossSpec::new(l, 1.0).unwrap();
        let fam = |x: f64| coh_sqz(alpha_sq, r, x)?.apply_loss(&loss);
        let q = qfi_mixed_gaussian(&fam, phi).unwrap();
        let q0 = qfi_pure_gaussian(&|x| coh_sqz(alpha_sq, r, x), phi).unwrap();
        prop_assert!(q <= q0 * (1.0 + 1e-6));
        let schemes = [DetectionScheme::Homodyne { mode: 1, angle: 0.0 }, DetectionScheme::Intensity { mode: 1 }, DetectionScheme::IntensityDifference { mode_a: 1, mode_b: 2 }];
        for scheme in schemes {
            let mom = |x: f64| scheme.measure(&fam(x)?);
            if let Ok(v) = phase_variance_error_prop(&mom, phi) {
                prop_assert!(v >= 1.0 / q - 1e-9, "{scheme:?}: {v} < {}", 1.0 / q);
            }
        }
    }

    #[test]
    fn click_information_below_quantum_information(amp in 0.3..1.5f64, r in 0.0..0.6f64, phi in 0.3..2.8f64) {
        let fam = move |x: f64| coh_sqz(amp * amp, r, x);
        let probs = BranchSet::complete(move |x| click_pattern_probabilities(&WignerExpr::from_gaussian(&fam(x)?)?, &[1, 2]));
        if let Ok(c) = cfi(&probs, phi) {
            let q = qfi_pure_gaussian(&fam, phi).unwrap();
            prop_assert!(c <= q * (1.0 + 1e-5) + 1e-8, "{c} > {q}");
        }
    }

    #[test]
    fn discarding_failures_loses_information(a in 0.05..0.95f64, b in 0.1..0.9f64, c in 0.1..0.9f64, w in 0.0..0.3f64, phi in -PI..PI) {
        let p = move |x: f64| Ok(a + w * (1.0 - a) * a * x.sin());
        let succ = BranchSet::complete(move |x: f64| { let q = b + (1.0 - b) * b * x.cos() * 0.5; Ok(vec![q, 1.0 - q]) });
        let fail = BranchSet::complete(move |x: f64| { let q = c + (1.0 - c) * c * (2.0 * x).sin() * 0.5; Ok(vec![q, 1.0 - q]) });
        let total = probabilistic_cfi(&p, &succ, Some(&fail), true, phi).unwrap();
        let kept = p(phi).unwrap() * cfi(&succ, phi).unwrap();
        prop_assert!(total >= kept - 1e-12);
    }

    #[test]
    fn thermal_injection_lowers_purity(a in pure_single_mode_state(), eta in 0.05..0.95f64, nbar in 0.05..3.0f64) {
        let w = WignerExpr::from_gaussian(&a).unwrap();
        let before = w.purity().unwrap();
        let after = w.attenuate(1, eta, nbar).unwrap().purity().unwrap();
        prop_assert!(after < before, "{after} >= {before}");
        let g = a.inject_thermal(1, nbar, eta).unwrap();
        prop_assert!((g.purity() - after).abs() < 1e-10);
    }

    #[test]
    fn pure_gaussian_and_wigner_information_agree(alpha_sq in 0.5..20.0f64, r in 0.0..1.0f64, phi in -PI..PI) {
        let g = |x: f64| coh_sqz(alpha_sq, r, x);
        let w = |x: f64| WignerExpr::from_gaussian(&coh_sqz(alpha_sq, r, x)?);
        let a = qfi_pure_gaussian(&g, phi).unwrap();
        let b = qfi_pure_wigner(&w, phi).unwrap();
        prop_assert!((a - b).abs() <= 1e-6 * a.max(1.0));
        let want = alpha_sq * (2.0 * r).exp() + r.sinh().powi(2);
        prop_assert!((a - want).abs() <= 1e-6 * want.max(1.0));
    }
}
