use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};

use mzsim_core::symplectic::*;
use nalgebra::DMatrix;

fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

#[test]
fn balanced_beam_splitter_entries() {
    let bs = beam_splitter(0.5).unwrap();
    for v in bs.matrix.iter() {
        assert!(*v == 0.0 || (v.abs() - FRAC_1_SQRT_2).abs() < 1e-15, "entry {v}");
    }
    assert_eq!(bs.matrix.iter().filter(|v| **v != 0.0).count(), 8);
}

#[test]
fn fully_transmitting_beam_splitter() {
    let bs = beam_splitter(1.0).unwrap();
    let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0]));
    assert!(max_diff(&bs.matrix, &want) < 1e-15);
}

#[test]
fn beam_splitter_is_symplectic() {
    assert!(beam_splitter(0.3).unwrap().symplectic_defect() < 1e-12);
    assert!(beam_splitter(1.3).is_err());
}

#[test]
fn phase_shifter_examples() {
    assert!(max_diff(&phase_shifter(0.0).unwrap().matrix, &DMatrix::identity(2, 2)) < 1e-15);
    let quarter = phase_shifter(FRAC_PI_2).unwrap();
    let want = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    assert!(max_diff(&quarter.matrix, &want) < 1e-15);
    let round_trip = compose(&symmetric_phase_shifter(0.7).unwrap(), &symmetric_phase_shifter(-0.7).unwrap()).unwrap();
    assert!(max_diff(&round_trip.matrix, &DMatrix::identity(4, 4)) < 1e-15);
}

#[test]
fn squeezer_examples() {
    assert!(max_diff(&squeezer(0.0, 0.4).unwrap().matrix, &DMatrix::identity(2, 2)) < 1e-15);
    let s = squeezer(1.0, 0.0).unwrap();
    let want = DMatrix::from_row_slice(2, 2, &[1f64.exp(), 0.0, 0.0, (-1f64).exp()]);
    assert!(max_diff(&s.matrix, &want) < 1e-14);
    let from_gain = squeezer_from_gain(0.8f64.cosh().powi(2)).unwrap();
    assert!(max_diff(&from_gain.matrix, &squeezer(0.8, 0.0).unwrap().matrix) < 1e-12);
    assert!(squeezer(-0.1, 0.0).is_err());
    assert!(squeezer_from_gain(0.5).is_err());
}

#[test]
fn displacement_shifts() {
    let zero = displacement(0.0, 1.0).unwrap();
    assert!(zero.shift_or_zero().amax() == 0.0);
    assert!(max_diff(&zero.matrix, &DMatrix::identity(2, 2)) == 0.0);
    let d = displacement(1.0, 0.0).unwrap().shift_or_zero();
    assert!((d[0] - SQRT_2).abs() < 1e-15 && d[1].abs() < 1e-15);
    let d = displacement(2.0, FRAC_PI_2).unwrap().shift_or_zero();
    assert!(d[0].abs() < 1e-15 && (d[1] - 2.0 * SQRT_2).abs() < 1e-15);
}

#[test]
fn direct_sum_examples() {
    let id = SymplecticTransform::identity(1);
    let sum = direct_sum(&[id.clone(), id.clone()]).unwrap();
    assert!(max_diff(&sum.matrix, &DMatrix::identity(4, 4)) == 0.0);

    let d = direct_sum(&[displacement(1.5, 0.3).unwrap(), id]).unwrap();
    assert!(max_diff(&d.matrix, &DMatrix::identity(4, 4)) == 0.0);
    let s = d.shift_or_zero();
    assert!((s[0] - SQRT_2 * 1.5 * 0.3f64.cos()).abs() < 1e-15);
    assert!((s[1] - SQRT_2 * 1.5 * 0.3f64.sin()).abs() < 1e-15);
    assert!(s[2] == 0.0 && s[3] == 0.0);

    // Independent single-mode squeezers are not a two-mode squeezer.
    let local = direct_sum(&[squeezer(0.5, 0.0).unwrap(), squeezer(0.5, 0.0).unwrap()]).unwrap();
    assert!(max_diff(&local.matrix, &two_mode_squeezer(0.5, 0.0).unwrap().matrix) > 0.1);
}

#[test]
fn composition_examples() {
    let f = mach_zehnder(0.9).unwrap();
    let g = compose(&SymplecticTransform::identity(2), &f).unwrap();
    assert!(max_diff(&g.matrix, &f.matrix) == 0.0);

    // The printed beam splitter is an involution, so the chain closes on itself at φ = 0.
    let m = mach_zehnder(0.0).unwrap().matrix;
    assert!((m - DMatrix::<f64>::identity(4, 4)).amax() < 1e-15);
    let half = mach_zehnder(std::f64::consts::PI).unwrap().matrix;
    assert!(half.view((0, 0), (2, 2)).amax() < 1e-15);
    assert!(half.view((2, 2), (2, 2)).amax() < 1e-15);
}

#[test]
fn displacement_composes_affinely() {
    let s = squeezer(0.4, 0.2).unwrap();
    let d = displacement(1.0, 0.5).unwrap();
    let f = compose(&s, &d).unwrap();
    let want = &s.matrix * d.shift_or_zero();
    assert!((f.shift_or_zero() - want).amax() < 1e-15);
}

#[test]
fn embedding_places_blocks() {
    let s = squeezer(0.3, 0.0).unwrap().embed(&[2], 3).unwrap();
    assert!((s.matrix[(2, 2)] - 0.3f64.exp()).abs() < 1e-15);
    assert!((s.matrix[(0, 0)] - 1.0).abs() < 1e-15);
    assert!(beam_splitter(0.5).unwrap().embed(&[1, 1], 2).is_err());
    assert!(beam_splitter(0.5).unwrap().embed(&[1, 4], 3).is_err());
}
