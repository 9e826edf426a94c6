//! Phase-estimation metrics: benchmarks, error propagation, classical and quantum
//! Fisher information, closed-form bounds and SNR.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, CoreError, CoreResult};
use crate::gaussian::GaussianState;
use crate::herald::HeraldedState;
use crate::measure::{parity, MeasurementMoments};
use crate::poly::Poly;
use crate::symplectic::omega;
use crate::wigner::{Term, WignerExpr};

/// Central-difference step for first derivatives in φ.
pub const FD_STEP: f64 = 1e-5;
pub const SLOPE_FLOOR: f64 = 1e-12;
pub const BRANCH_FLOOR: f64 = 1e-12;
pub const PURITY_TOL: f64 = 1e-6;
pub const GOLDEN_TOL: f64 = 1e-8;

pub fn snl(nbar_total: f64) -> CoreResult<f64> {
    if !(nbar_total > 0.0) {
        return domain(format!("mean photon number must be positive, got {nbar_total}"));
    }
    Ok(1.0 / nbar_total)
}

pub fn hl(nbar_total: f64) -> CoreResult<f64> {
    Ok(snl(nbar_total)?.powi(2))
}

/// Central difference of `f` at `x`.
pub fn derivative(f: &dyn Fn(f64) -> CoreResult<f64>, x: f64, h: f64) -> CoreResult<f64> {
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// Second derivative by Ridders' extrapolation of central second differences.
pub fn second_derivative(f: &dyn Fn(f64) -> CoreResult<f64>, x: f64) -> CoreResult<f64> {
    const NTAB: usize = 20;
    const CON: f64 = 1.6;
    const SAFE: f64 = 2.0;
    let f0 = f(x)?;
    let d2 = |h: f64| -> CoreResult<f64> { Ok((f(x + h)? - 2.0 * f0 + f(x - h)?) / (h * h)) };
    // Shrink the starting step until successive estimates agree to 10%, so the
    // extrapolation starts inside the asymptotic regime of sharply peaked signals.
    let mut h = 0.05;
    let mut prev = d2(h)?;
    while h > 1e-5 {
        let next = d2(h / 2.0)?;
        if (next - prev).abs() <= 0.1 * next.abs() {
            break;
        }
        h /= 2.0;
        prev = next;
    }
    let mut table = vec![vec![0.0; NTAB]; NTAB];
    table[0][0] = d2(h)?;
    let mut best = table[0][0];
    let mut err = f64::MAX;
    let con2 = CON * CON;
    for i in 1..NTAB {
        h /= CON;
        table[0][i] = d2(h)?;
        let mut fac = con2;
        for j in 1..=i {
            // error series of the central second difference is even in h
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= con2;
            let e = (table[j][i] - table[j - 1][i]).abs().max((table[j][i] - table[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= SAFE * err {
            break;
        }
    }
    Ok(best)
}

pub type MomentsFn<'a> = dyn Fn(f64) -> CoreResult<MeasurementMoments> + 'a;

/// `Var(φ) / |∂⟨O⟩/∂φ|²`.
pub fn phase_variance_error_prop(moments: &MomentsFn, phi: f64) -> CoreResult<f64> {
    let mean = |x: f64| moments(x).map(|m| m.mean);
    let slope = derivative(&mean, phi, FD_STEP)?;
    if !(slope.abs() > SLOPE_FLOOR) {
        return Err(CoreError::SignalStationary { phi, derivative: slope });
    }
    Ok(moments(phi)?.variance / (slope * slope))
}

/// Limit of the error-propagation formula at a point where the observable is an
/// eigenvalue (zero variance) and its mean is stationary: `Var''/(2 ⟨O⟩''²)`.
pub fn phase_variance_stationary(moments: &MomentsFn, phi: f64) -> CoreResult<f64> {
    let mean = |x: f64| moments(x).map(|m| m.mean);
    let var = |x: f64| moments(x).map(|m| m.second_moment - m.mean * m.mean);
    let m2 = second_derivative(&mean, phi)?;
    if !(m2.abs() > SLOPE_FLOOR) {
        return Err(CoreError::SignalStationary { phi, derivative: m2 });
    }
    Ok(second_derivative(&var, phi)? / (2.0 * m2 * m2))
}

/// Error propagation, switching to the stationary limit when the state is an
/// eigenstate of the observable at `phi`.
pub fn phase_variance_at(moments: &MomentsFn, phi: f64) -> CoreResult<f64> {
    let m = moments(phi)?;
    let scale = m.second_moment.abs().max(1.0);
    if m.variance <= 1e-12 * scale {
        return phase_variance_stationary(moments, phi);
    }
    phase_variance_error_prop(moments, phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub phi: f64,
    pub value: f64,
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_section_minimize(f: &dyn Fn(f64) -> CoreResult<f64>, a: f64, b: f64, tol: f64) -> CoreResult<Minimum> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let phi = 0.5 * (a + b);
    Ok(Minimum { phi, value: f(phi)? })
}

/// Minimizes the phase variance in a window around `seed`, clipped to `(0, 2π)`.
pub fn minimize_phase_variance(moments: &MomentsFn, seed: f64, half_width: f64) -> CoreResult<Minimum> {
    let lo = (seed - half_width).max(1e-9);
    let hi = (seed + half_width).min(2.0 * PI - 1e-9);
    let f = |x: f64| phase_variance_at(moments, x);
    golden_section_minimize(&f, lo, hi, GOLDEN_TOL)
}

pub type ProbsFn<'a> = dyn Fn(f64) -> CoreResult<Vec<f64>> + 'a;

/// Outcome probabilities as a function of φ.
pub struct BranchSet<'a> {
    pub probs: Box<ProbsFn<'a>>,
    pub complete: bool,
}

impl<'a> BranchSet<'a> {
    pub fn complete(probs: impl Fn(f64) -> CoreResult<Vec<f64>> + 'a) -> Self {
        Self { probs: Box::new(probs), complete: true }
    }
}

/// `Σ_i P_i'² / P_i`.
pub fn cfi(branches: &BranchSet, phi: f64) -> CoreResult<f64> {
    let p = (branches.probs)(phi)?;
    if branches.complete {
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return domain(format!("branch probabilities sum to {s}, not 1"));
        }
    }
    for (i, &pi) in p.iter().enumerate() {
        if !(pi > BRANCH_FLOOR) {
            return Err(CoreError::DegenerateBranch { index: i, probability: pi });
        }
    }
    let pp = (branches.probs)(phi + FD_STEP)?;
    let pm = (branches.probs)(phi - FD_STEP)?;
    if pp.len() != p.len() || pm.len() != p.len() {
        return domain("branch count changed with phi");
    }
    Ok(p.iter()
        .zip(pp.iter().zip(&pm))
        .map(|(&pi, (&a, &b))| {
            let d = (a - b) / (2.0 * FD_STEP);
            d * d / pi
        })
        .sum())
}

/// Herald probability as a function of φ.
pub type HeraldProbFn<'a> = dyn Fn(f64) -> CoreResult<f64> + 'a;

/// `P₊ CFI₊ + (1 - P₊) CFI₋` plus, optionally, the herald term `P₊'²/(P₊(1 - P₊))`.
pub fn probabilistic_cfi(
    p_success: &HeraldProbFn,
    success: &BranchSet,
    failure: Option<&BranchSet>,
    include_herald: bool,
    phi: f64,
) -> CoreResult<f64> {
    let p = p_success(phi)?;
    if !(0.0..=1.0 + 1e-12).contains(&p) {
        return domain(format!("herald probability {p} outside [0, 1]"));
    }
    let mut total = p * cfi(success, phi)?;
    if let Some(f) = failure {
        if p < 1.0 {
            total += (1.0 - p) * cfi(f, phi)?;
        }
    }
    if include_herald && p > 0.0 && p < 1.0 {
        let d = derivative(p_success, phi, FD_STEP)?;
        total += d * d / (p * (1.0 - p));
    }
    Ok(total)
}

pub type WignerFamily<'a> = dyn Fn(f64) -> CoreResult<WignerExpr> + 'a;
pub type GaussianFamily<'a> = dyn Fn(f64) -> CoreResult<GaussianState> + 'a;

/// `∂W/∂φ` from central differences of each term's parameters.
pub fn wigner_phase_derivative(family: &WignerFamily, phi: f64, h: f64) -> CoreResult<WignerExpr> {
    let e0 = family(phi)?;
    let ep = family(phi + h)?;
    let em = family(phi - h)?;
    if ep.terms().len() != e0.terms().len() || em.terms().len() != e0.terms().len() {
        return Err(CoreError::NumericalConditioning("term structure changes with phi".into()));
    }
    let mut terms = Vec::with_capacity(e0.terms().len());
    for ((t0, tp), tm) in e0.terms().iter().zip(ep.terms()).zip(em.terms()) {
        terms.push(term_derivative(t0, tp, tm, h)?);
    }
    WignerExpr::from_terms(e0.modes(), terms)
}

fn term_derivative(t0: &Term, tp: &Term, tm: &Term, h: f64) -> CoreResult<Term> {
    let n = t0.nvars();
    let inv = t0
        .quad
        .clone()
        .try_inverse()
        .ok_or_else(|| CoreError::NumericalConditioning("singular Gaussian factor".into()))?;
    let dw = (tp.weight - tm.weight) / (2.0 * h);
    let mut dpoly = tp.poly.clone();
    dpoly.add_scaled(&tm.poly, -1.0);
    let dpoly = dpoly.scaled(1.0 / (2.0 * h));
    let dmean = (&tp.mean - &tm.mean) / (2.0 * h);
    let dquad = (&tp.quad - &tm.quad) / (2.0 * h);
    let a = &inv * &dmean;
    let b = &inv * &dquad * &inv;

    // g(X) = 2aᵀ(X - m) + (X - m)ᵀ B (X - m), in terms of centred variables then shifted.
    let mut centred = Poly::linear(&a.iter().map(|v| 2.0 * v).collect::<Vec<_>>(), 0.0);
    for i in 0..n {
        for j in 0..n {
            if b[(i, j)] != 0.0 {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                centred.add_term(e, b[(i, j)]);
            }
        }
    }
    let g = centred.substitute_affine(&DMatrix::identity(n, n), &(-&t0.mean));
    let mut poly = t0.poly.scaled(dw);
    poly.add_scaled(&dpoly, t0.weight);
    poly.add_scaled(&t0.poly.mul(&g), t0.weight);
    Ok(Term { weight: 1.0, poly, mean: t0.mean.clone(), quad: t0.quad.clone() })
}

/// `2 (2π)^M ∫ (∂W/∂φ)² dX` for a pure-state family.
pub fn qfi_pure_wigner(family: &WignerFamily, phi: f64) -> CoreResult<f64> {
    let w = family(phi)?;
    let purity = w.purity()?;
    if (purity - 1.0).abs() > PURITY_TOL {
        return Err(CoreError::PurityViolation { purity });
    }
    let dw = wigner_phase_derivative(family, phi, FD_STEP)?;
    Ok(2.0 * (2.0 * PI).powi(w.modes() as i32) * dw.overlap(&dw)?)
}

fn gaussian_derivatives(family: &GaussianFamily, phi: f64) -> CoreResult<(GaussianState, DVector<f64>, DMatrix<f64>)> {
    let s = family(phi)?;
    let sp = family(phi + FD_STEP)?;
    let sm = family(phi - FD_STEP)?;
    let dd = (&sp.mean - &sm.mean) / (2.0 * FD_STEP);
    let ds = (&sp.cov - &sm.cov) / (2.0 * FD_STEP);
    Ok((s, dd, ds))
}

/// `2 ∂dᵀσ⁻¹∂d + ¼ Tr[(σ⁻¹∂σ)²]` for pure Gaussian families.
pub fn qfi_pure_gaussian(family: &GaussianFamily, phi: f64) -> CoreResult<f64> {
    let (s, dd, ds) = gaussian_derivatives(family, phi)?;
    pure_gaussian_qfi_from(&s, &dd, &ds)
}

fn pure_gaussian_qfi_from(s: &GaussianState, dd: &DVector<f64>, ds: &DMatrix<f64>) -> CoreResult<f64> {
    let inv = s.cov.clone().try_inverse().ok_or_else(|| CoreError::NumericalConditioning("singular covariance".into()))?;
    let mean_part = 2.0 * (dd.transpose() * &inv * dd)[(0, 0)];
    let x = &inv * ds;
    Ok(mean_part + 0.25 * (&x * &x).trace())
}

fn complex_basis(modes: usize) -> DMatrix<Complex64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        h[(2 * k, 2 * k)] = Complex64::new(r, 0.0);
        h[(2 * k, 2 * k + 1)] = Complex64::new(0.0, r);
        h[(2 * k + 1, 2 * k)] = Complex64::new(r, 0.0);
        h[(2 * k + 1, 2 * k + 1)] = Complex64::new(0.0, -r);
    }
    h
}

/// QFI of a possibly mixed Gaussian family, evaluated in the complex basis
/// `(a, a†)`: `½ vec(∂σ_c)† (σ̄_c ⊗ σ_c - K ⊗ K)⁻¹ vec(∂σ_c) + 2 ∂d_c† σ_c⁻¹ ∂d_c`.
pub fn qfi_mixed_gaussian(family: &GaussianFamily, phi: f64) -> CoreResult<f64> {
    let (s, dd, ds) = gaussian_derivatives(family, phi)?;
    if s.purity() >= 1.0 - 1e-9 {
        return pure_gaussian_qfi_from(&s, &dd, &ds);
    }
    let n = s.modes();
    let h = complex_basis(n);
    let hd = h.adjoint();
    let to_c = |m: &DMatrix<f64>| m.map(|v| Complex64::new(v, 0.0));
    let sc = &h * to_c(&s.cov) * &hd;
    let dsc = &h * to_c(&ds) * &hd;
    let ddc = &h * dd.map(|v| Complex64::new(v, 0.0));
    let k = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i != j {
            Complex64::new(0.0, 0.0)
        } else if i % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        }
    });
    let big = sc.conjugate().kronecker(&sc) - k.kronecker(&k);
    let v = DVector::from_column_slice(dsc.as_slice());
    let solve = |eps: f64| -> Option<Complex64> {
        let m = &big + DMatrix::<Complex64>::identity(big.nrows(), big.ncols()) * Complex64::new(eps, 0.0);
        let x = m.lu().solve(&v)?;
        Some((v.adjoint() * x)[(0, 0)])
    };
    let cov_term = match solve(0.0) {
        Some(q) if q.re.is_finite() => q,
        _ => {
            let eps = 1e-10 * s.cov.norm();
            let a = solve(eps).ok_or_else(|| CoreError::NumericalConditioning("regularized QFI solve failed".into()))?;
            let b = solve(eps / 10.0).ok_or_else(|| CoreError::NumericalConditioning("regularized QFI solve failed".into()))?;
            if (a.re - b.re).abs() > 1e-6 * a.re.abs().max(1e-12) {
                return Err(CoreError::NumericalConditioning("regularized QFI is unstable".into()));
            }
            b
        }
    };
    let sc_inv = sc.clone().try_inverse().ok_or_else(|| CoreError::NumericalConditioning("singular covariance".into()))?;
    let mean_term = (ddc.adjoint() * sc_inv * &ddc)[(0, 0)];
    Ok(0.5 * cov_term.re + 2.0 * mean_term.re)
}

/// Same quantity in the real quadrature basis, `(σ ⊗ σ - Ω ⊗ Ω)`; used to cross-check.
pub fn qfi_mixed_gaussian_real(family: &GaussianFamily, phi: f64) -> CoreResult<f64> {
    let (s, dd, ds) = gaussian_derivatives(family, phi)?;
    let om = omega(s.modes());
    let big = s.cov.kronecker(&s.cov) - om.kronecker(&om);
    let v = DVector::from_column_slice(ds.as_slice());
    let x = big.lu().solve(&v).ok_or_else(|| CoreError::NumericalConditioning("singular QFI system".into()))?;
    let inv = s.cov.clone().try_inverse().ok_or_else(|| CoreError::NumericalConditioning("singular covariance".into()))?;
    Ok(0.5 * v.dot(&x) + 2.0 * (dd.transpose() * inv * &dd)[(0, 0)])
}

/// `(mean - m) / √variance`.
pub fn snr(moments: &MeasurementMoments, subtract_injected: usize) -> CoreResult<f64> {
    if !(moments.variance > 0.0) {
        return domain("SNR needs a positive variance");
    }
    Ok((moments.mean - subtract_injected as f64) / moments.variance.sqrt())
}

pub type HeraldFamily<'a> = dyn Fn(f64) -> CoreResult<HeraldedState> + 'a;

/// `Σ_b P_b (∂⟨Π̂⟩_b/∂φ)² / (1 - ⟨Π̂⟩_b²)` over a matched success/failure pair, with
/// parity read on `mode`.
pub fn total_parity_information(success: &HeraldFamily, failure: Option<&HeraldFamily>, mode: usize, phi: f64) -> CoreResult<f64> {
    let mut total = 0.0;
    let mut any_slope = false;
    let mut families: Vec<&HeraldFamily> = vec![success];
    if let Some(f) = failure {
        families.push(f);
    }
    for fam in families {
        let b = fam(phi)?;
        if b.probability <= 0.0 {
            continue;
        }
        let mean = |x: f64| -> CoreResult<f64> { Ok(parity(&fam(x)?.state, mode)?.mean) };
        let slope = derivative(&mean, phi, FD_STEP)?;
        let pm = parity(&b.state, mode)?;
        if slope.abs() > SLOPE_FLOOR {
            any_slope = true;
            if pm.variance > 0.0 {
                total += b.probability * slope * slope / pm.variance;
            }
        }
    }
    if !any_slope {
        return Err(CoreError::SignalStationary { phi, derivative: 0.0 });
    }
    Ok(total)
}

/// Joint click/no-click probabilities on `modes`, indexed by the bit pattern
/// (bit `i` set = click on `modes[i]`).
pub fn click_pattern_probabilities(expr: &WignerExpr, modes: &[usize]) -> CoreResult<Vec<f64>> {
    let k = modes.len();
    // P(no click on every mode in subset S), by sequential unnormalized projections.
    let mut no_click = vec![0.0; 1 << k];
    for (s, slot) in no_click.iter_mut().enumerate() {
        let mut e = expr.clone();
        let mut removed: Vec<usize> = Vec::new();
        for (i, &m) in modes.iter().enumerate() {
            if s & (1 << i) != 0 {
                let shift = removed.iter().filter(|&&r| r < m).count();
                e = e.project_fock_raw(m - shift, 0)?.0;
                removed.push(m);
            }
        }
        *slot = e.norm();
    }
    let mut out = vec![0.0; 1 << k];
    for (pattern, slot) in out.iter_mut().enumerate() {
        // clicks on `pattern`, none elsewhere: inclusion-exclusion over clicking subsets
        let quiet = !pattern & ((1 << k) - 1);
        let mut acc = 0.0;
        let mut sub = pattern;
        loop {
            let sign = if sub.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * no_click[quiet | sub];
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & pattern;
        }
        *slot = acc;
    }
    Ok(out)
}

/// Closed-form bounds and detector minima for a coherent state and squeezed vacuum
/// entering the interferometer.
pub mod bounds {
    use super::*;

    fn check(alpha_sq: f64, r: f64) -> CoreResult<()> {
        if !(alpha_sq >= 0.0) || !(r >= 0.0) {
            return domain(format!("need |α|² >= 0 and r >= 0, got {alpha_sq}, {r}"));
        }
        Ok(())
    }

    pub fn lossless_qfi(alpha_sq: f64, r: f64) -> CoreResult<f64> {
        check(alpha_sq, r)?;
        Ok(alpha_sq * (2.0 * r).exp() + r.sinh().powi(2))
    }

    pub fn lossless_qcrb(alpha_sq: f64, r: f64) -> CoreResult<f64> {
        Ok(1.0 / lossless_qfi(alpha_sq, r)?)
    }

    /// Lossy QCRB transcribed term by term; see the mixed-Gaussian QFI for the
    /// authoritative value.
    pub fn lossy_qcrb_printed(alpha_sq: f64, r: f64, loss: f64) -> CoreResult<f64> {
        check(alpha_sq, r)?;
        if !(0.0..=1.0).contains(&loss) {
            return domain(format!("loss must lie in [0, 1], got {loss}"));
        }
        let a = 1.0 - loss;
        let b = r.sinh();
        let c = r.cosh();
        let c2r = (2.0 * r).cosh();
        let inner = 4.0 * a * b.powi(4) * (a - a * c2r - 1.0)
            + b * b * (2.0 - a - 4.0 * a * alpha_sq + 2.0 * c2r + a * (4.0 * r).cosh())
            - a * (2.0 * r).sinh().powi(3);
        let num = a * (a * b - c) * (a * b + c) * r.exp() * (8.0 * a.powi(3) * b.powi(5) * c + 4.0 * alpha_sq * c * c + a * inner);
        let den = (b - 2.0 * a * b + c) * (1.0 + a * a - c2r * (a * a - 1.0)).powi(2);
        Ok(-num / den)
    }

    pub fn parity_min(alpha_sq: f64, r: f64) -> CoreResult<f64> {
        lossless_qcrb(alpha_sq, r)
    }

    pub fn homodyne_min(alpha_sq: f64, r: f64) -> CoreResult<f64> {
        check(alpha_sq, r)?;
        Ok(1.0 / (alpha_sq * (2.0 * r).exp()))
    }

    pub fn difference_min(alpha_sq: f64, r: f64) -> CoreResult<f64> {
        check(alpha_sq, r)?;
        let num = (-2.0 * r).exp() * (4.0 * alpha_sq + ((2.0 * r).exp() - 1.0).powi(2));
        Ok(num / ((2.0 * r).cosh() - 2.0 * alpha_sq - 1.0).powi(2))
    }

    pub fn intensity_min(alpha_sq: f64, r: f64) -> CoreResult<f64> {
        check(alpha_sq, r)?;
        let a = alpha_sq.sqrt();
        let num = 4.0 * alpha_sq * (-2.0 * r).exp() + 2.0 * (2.0 * r).cosh() + 4.0 * 2f64.sqrt() * a * (2.0 * r).sinh() - 2.0;
        Ok(num / ((2.0 * r).cosh() - 2.0 * alpha_sq - 1.0).powi(2))
    }

    pub fn intensity_optimal_phase(alpha_sq: f64, r: f64) -> CoreResult<f64> {
        check(alpha_sq, r)?;
        if r == 0.0 {
            return domain("optimal intensity phase needs r > 0");
        }
        Ok(2.0 * (2f64.powf(0.25) * (alpha_sq.sqrt() / (2.0 * r).sinh()).sqrt()).atan())
    }

    #[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
    #[serde(rename_all = "snake_case")]
    pub enum ClosedFormKind {
        LosslessQcrb,
        LossyQcrb,
        Parity,
        Homodyne,
        Difference,
        Intensity,
    }

    /// Minimum phase variance and optimal phase of each closed form.
    pub fn qcrb_closed_forms(kind: ClosedFormKind, alpha_sq: f64, r: f64, loss: f64) -> CoreResult<(f64, Option<f64>)> {
        Ok(match kind {
            ClosedFormKind::LosslessQcrb => (lossless_qcrb(alpha_sq, r)?, None),
            ClosedFormKind::LossyQcrb => (lossy_qcrb_printed(alpha_sq, r, loss)?, None),
            ClosedFormKind::Parity => (parity_min(alpha_sq, r)?, Some(PI)),
            ClosedFormKind::Homodyne => (homodyne_min(alpha_sq, r)?, Some(PI)),
            ClosedFormKind::Difference => (difference_min(alpha_sq, r)?, Some(PI / 2.0)),
            ClosedFormKind::Intensity => (intensity_min(alpha_sq, r)?, Some(intensity_optimal_phase(alpha_sq, r)?)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeEstimate {
    pub scheme: String,
    pub phase_variance: Option<f64>,
    pub optimal_phi: Option<f64>,
    pub snr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub phi: f64,
    pub schemes: Vec<SchemeEstimate>,
    pub cfi: Option<f64>,
    pub qfi: Option<f64>,
    pub qcrb: Option<f64>,
    pub snl: Option<f64>,
    pub hl: Option<f64>,
}
