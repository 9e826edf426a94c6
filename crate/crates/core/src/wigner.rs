//! Wigner functions as weighted sums of polynomial × Gaussian terms.
//!
//! A term evaluates to `weight · P(X) · exp(-(X - mean)ᵀ quad⁻¹ (X - mean))`. The class
//! is closed under linear symplectic substitution, multiplication by Fock-state Wigner
//! functions and partial integration, which covers every heralded state built here.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, CoreError, CoreResult};
use crate::gaussian::GaussianState;
use crate::poly::{radial_laguerre, Exponents, Poly};
use crate::symplectic::{mode_rows, SymplecticTransform};

pub const FOCK_CUTOFF: usize = 64;
pub const DEFAULT_N_MAX: usize = 40;
pub const IMPROBABLE_THRESHOLD: f64 = 1e-14;
pub const DISTRIBUTION_EPS: f64 = 1e-9;

fn chol_inverse_det(m: &DMatrix<f64>) -> CoreResult<(DMatrix<f64>, f64)> {
    if m.nrows() == 0 {
        return Ok((m.clone(), 1.0));
    }
    let ch = m
        .clone()
        .cholesky()
        .ok_or_else(|| CoreError::NumericalConditioning("Gaussian factor is not positive definite".into()))?;
    let det = ch.l().diagonal().iter().map(|d| d * d).product();
    Ok((ch.inverse(), det))
}

fn select(v: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_fn(idx.len(), |i, _| v[idx[i]])
}

fn select2(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub weight: f64,
    pub poly: Poly,
    pub mean: DVector<f64>,
    pub quad: DMatrix<f64>,
}

impl Term {
    pub fn nvars(&self) -> usize {
        self.mean.len()
    }

    /// Integral of the bare exponential, `π^N √det quad`.
    fn gaussian_mass(&self) -> CoreResult<f64> {
        let (_, det) = chol_inverse_det(&self.quad)?;
        Ok(PI.powi(self.nvars() as i32 / 2) * det.sqrt())
    }

    /// `∫ Q(X) · term dX` for an extra polynomial factor `Q`.
    pub fn integral_with(&self, extra: Option<&Poly>) -> CoreResult<f64> {
        let poly = match extra {
            Some(q) => self.poly.mul(q),
            None => self.poly.clone(),
        };
        if self.nvars() == 0 {
            return Ok(self.weight * poly.coeff(&[]));
        }
        let mass = self.gaussian_mass()?;
        let e = poly.gaussian_expectation(&self.mean, &(&self.quad * 0.5));
        Ok(self.weight * mass * e)
    }

    pub fn eval(&self, x: &[f64]) -> CoreResult<f64> {
        if self.nvars() == 0 {
            return Ok(self.weight * self.poly.coeff(&[]));
        }
        let (inv, _) = chol_inverse_det(&self.quad)?;
        let d = DVector::from_column_slice(x) - &self.mean;
        let q = (d.transpose() * inv * &d)[(0, 0)];
        Ok(self.weight * self.poly.eval(x) * (-q).exp())
    }

    /// Multiplies by `weight · P(X) · exp(-(X_S - center)ᵀ quad⁻¹ (X_S - center))` where
    /// the Gaussian acts only on the variables `vars` and `poly` spans all variables.
    pub fn multiply(&self, vars: &[usize], weight: f64, poly: &Poly, center: &DVector<f64>, quad: &DMatrix<f64>) -> CoreResult<Term> {
        let all: Vec<usize> = (0..self.nvars()).collect();
        let q_ss = select2(&self.quad, vars, vars);
        let q_as = select2(&self.quad, &all, vars);
        let (k, _) = chol_inverse_det(&(quad + q_ss))?;
        let u = select(&self.mean, vars) - center;
        let gain = &q_as * &k;
        let mean = &self.mean - &gain * &u;
        let mut new_quad = &self.quad - &gain * q_as.transpose();
        new_quad = (&new_quad + new_quad.transpose()) * 0.5;
        let c = (u.transpose() * &k * &u)[(0, 0)];
        Ok(Term { weight: self.weight * weight * (-c).exp(), poly: self.poly.mul(poly), mean, quad: new_quad })
    }

    /// Product of two terms over the same variables.
    pub fn product(&self, other: &Term) -> CoreResult<Term> {
        let all: Vec<usize> = (0..self.nvars()).collect();
        if all.is_empty() {
            return Ok(Term {
                weight: self.weight * other.weight,
                poly: self.poly.mul(&other.poly),
                mean: self.mean.clone(),
                quad: self.quad.clone(),
            });
        }
        self.multiply(&all, other.weight, &other.poly, &other.mean, &other.quad)
    }

    /// Integrates out the variables in `out` (sorted ascending).
    pub fn marginalize(&self, out: &[usize]) -> CoreResult<Term> {
        let n = self.nvars();
        let keep: Vec<usize> = (0..n).filter(|i| !out.contains(i)).collect();
        let sigma = &self.quad * 0.5;
        let s_aa = select2(&sigma, &keep, &keep);
        let s_ab = select2(&sigma, &keep, out);
        let s_bb = select2(&sigma, out, out);
        let (s_aa_inv, _) = chol_inverse_det(&s_aa)?;
        let gain = s_ab.transpose() * &s_aa_inv; // |B| x |A|
        let mut cond = &s_bb - &gain * &s_ab;
        cond = (&cond + cond.transpose()) * 0.5;
        let (_, det_cond) = chol_inverse_det(&cond)?;
        let m_a = select(&self.mean, &keep);
        let m_b = select(&self.mean, out);
        let offset = &m_b - &gain * &m_a;

        // x_A = y_A; x_B = gain·y_A + offset + y_B with y_B ~ N(0, cond).
        let na = keep.len();
        let mut a = DMatrix::zeros(n, n);
        let mut b = DVector::zeros(n);
        for (pa, &i) in keep.iter().enumerate() {
            a[(i, pa)] = 1.0;
        }
        for (pb, &i) in out.iter().enumerate() {
            for pa in 0..na {
                a[(i, pa)] = gain[(pb, pa)];
            }
            a[(i, na + pb)] = 1.0;
            b[i] = offset[pb];
        }
        let sub = self.poly.substitute_affine(&a, &b);
        let over: Vec<usize> = (na..n).collect();
        let poly = sub.partial_expectation(&over, &cond);

        // mass ratio: π^{|B|/2} √(det Q / det Q_AA) = π^{|B|/2} √det(2·cond)
        let nb = out.len();
        let ratio = PI.powi(nb as i32 / 2) * (2f64.powi(nb as i32) * det_cond).sqrt();
        Ok(Term { weight: self.weight * ratio, poly, mean: m_a, quad: &s_aa * 2.0 })
    }

    fn transformed(&self, f: &SymplecticTransform) -> Term {
        let inv = f.inverse_matrix();
        let shift = f.shift_or_zero();
        let poly = self.poly.substitute_affine(&inv, &(-(&inv * &shift)));
        let quad = &f.matrix * &self.quad * f.matrix.transpose();
        Term { weight: self.weight, poly, mean: f.apply(&self.mean), quad: (&quad + quad.transpose()) * 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonNumberDistribution {
    pub probs: Vec<f64>,
    pub n_max: usize,
    pub tail: f64,
}

impl PhotonNumberDistribution {
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| (n * n) as f64 * p).sum()
    }

    pub fn parity(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| if n % 2 == 0 { *p } else { -p }).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerExpr {
    modes: usize,
    terms: Vec<Term>,
    norm: f64,
}

impl WignerExpr {
    /// Builds an expression and caches its integral.
    pub fn from_terms(modes: usize, terms: Vec<Term>) -> CoreResult<Self> {
        for t in &terms {
            if t.nvars() != 2 * modes || t.poly.nvars() != 2 * modes {
                return Err(CoreError::DimensionMismatch { expected: 2 * modes, got: t.nvars() });
            }
        }
        let mut e = Self { modes, terms, norm: 0.0 };
        e.norm = e.integral()?;
        Ok(e)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn integral(&self) -> CoreResult<f64> {
        self.terms.iter().map(|t| t.integral_with(None)).sum()
    }

    pub fn normalize(&self) -> CoreResult<Self> {
        if !(self.norm.abs() > 0.0) {
            return Err(CoreError::NumericalConditioning("cannot normalize a zero-mass expression".into()));
        }
        Ok(self.scaled(1.0 / self.norm))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let terms = self.terms.iter().map(|t| Term { weight: t.weight * s, ..t.clone() }).collect();
        Self { modes: self.modes, terms, norm: self.norm * s }
    }

    /// Sum of two expressions over the same modes.
    pub fn plus(&self, other: &Self) -> CoreResult<Self> {
        if self.modes != other.modes {
            return Err(CoreError::DimensionMismatch { expected: self.modes, got: other.modes });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self { modes: self.modes, terms, norm: self.norm + other.norm })
    }

    pub fn from_gaussian(state: &GaussianState) -> CoreResult<Self> {
        let n = state.modes();
        let (_, det) = chol_inverse_det(&state.cov)?;
        let weight = 1.0 / (PI.powi(n as i32) * det.sqrt());
        let term = Term { weight, poly: Poly::constant(2 * n, 1.0), mean: state.mean.clone(), quad: state.cov.clone() };
        Self::from_terms(n, vec![term])
    }

    /// `(1/π)(-1)ⁿ Lₙ(2(x² + p²)) e^{-x²-p²}`.
    pub fn fock(n: usize) -> CoreResult<Self> {
        if n > FOCK_CUTOFF {
            return domain(format!("Fock number {n} exceeds cutoff {FOCK_CUTOFF}"));
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = Term {
            weight: sign / PI,
            poly: radial_laguerre(n, 2.0, 2, 0, 1),
            mean: DVector::zeros(2),
            quad: DMatrix::identity(2, 2),
        };
        Self::from_terms(1, vec![term])
    }

    /// Ordered tensor product; `parts[0]` occupies mode 1.
    pub fn tensor(parts: &[WignerExpr]) -> CoreResult<Self> {
        if parts.is_empty() {
            return domain("tensor product of an empty list");
        }
        let mut acc = parts[0].clone();
        for p in &parts[1..] {
            acc = acc.tensor_with(p);
        }
        Ok(acc)
    }

    fn tensor_with(&self, other: &Self) -> Self {
        let na = 2 * self.modes;
        let nb = 2 * other.modes;
        let n = na + nb;
        let map_a: Vec<usize> = (0..na).collect();
        let map_b: Vec<usize> = (na..n).collect();
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut mean = DVector::zeros(n);
                mean.rows_mut(0, na).copy_from(&a.mean);
                mean.rows_mut(na, nb).copy_from(&b.mean);
                let mut quad = DMatrix::zeros(n, n);
                quad.view_mut((0, 0), (na, na)).copy_from(&a.quad);
                quad.view_mut((na, na), (nb, nb)).copy_from(&b.quad);
                let poly = a.poly.embed(n, &map_a).mul(&b.poly.embed(n, &map_b));
                terms.push(Term { weight: a.weight * b.weight, poly, mean, quad });
            }
        }
        Self { modes: self.modes + other.modes, terms, norm: self.norm * other.norm }
    }

    /// `W(X) ↦ W(f⁻¹(X - shift))`.
    pub fn apply_symplectic(&self, f: &SymplecticTransform) -> CoreResult<Self> {
        if f.dim() != 2 * self.modes {
            return Err(CoreError::DimensionMismatch { expected: 2 * self.modes, got: f.dim() });
        }
        let terms = self.terms.iter().map(|t| t.transformed(f)).collect();
        Ok(Self { modes: self.modes, terms, norm: self.norm })
    }

    pub fn evaluate(&self, x: &[f64]) -> CoreResult<f64> {
        if x.len() != 2 * self.modes {
            return Err(CoreError::DimensionMismatch { expected: 2 * self.modes, got: x.len() });
        }
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// `∫ P(X) W(X) dX`.
    pub fn expectation(&self, poly: &Poly) -> CoreResult<f64> {
        if poly.nvars() != 2 * self.modes {
            return Err(CoreError::DimensionMismatch { expected: 2 * self.modes, got: poly.nvars() });
        }
        self.terms.iter().map(|t| t.integral_with(Some(poly))).sum()
    }

    /// `∫ X^exponents W(X) dX`.
    pub fn moment(&self, exponents: &[u16]) -> CoreResult<f64> {
        let p = Poly::from_terms(2 * self.modes, [(exponents.to_vec() as Exponents, 1.0)]);
        self.expectation(&p)
    }

    pub fn marginalize(&self, mode: usize) -> CoreResult<Self> {
        if self.modes < 2 {
            return domain("marginalize needs at least two modes");
        }
        self.integrate_mode(mode)
    }

    fn integrate_mode(&self, mode: usize) -> CoreResult<Self> {
        let (a, b) = mode_rows(mode, self.modes)?;
        let terms = self.terms.iter().map(|t| t.marginalize(&[a, b])).collect::<CoreResult<Vec<_>>>()?;
        Ok(Self { modes: self.modes - 1, terms, norm: self.norm })
    }

    /// Single-mode marginal of `mode`.
    pub fn reduce_to(&self, mode: usize) -> CoreResult<Self> {
        mode_rows(mode, self.modes)?;
        let mut e = self.clone();
        for m in (1..=self.modes).rev() {
            if m != mode {
                e = e.integrate_mode(m)?;
            }
        }
        Ok(e)
    }

    /// Marginal over the listed modes (1-based), keeping their original relative order.
    pub fn reduce_to_modes(&self, modes: &[usize]) -> CoreResult<Self> {
        for &m in modes {
            mode_rows(m, self.modes)?;
        }
        let mut e = self.clone();
        for m in (1..=self.modes).rev() {
            if !modes.contains(&m) {
                e = e.integrate_mode(m)?;
            }
        }
        Ok(e)
    }

    /// Mixes `mode` with a thermal environment (`nbar_env = 0` is pure loss) on a
    /// beam splitter of transmissivity `eta` and traces the environment out.
    pub fn attenuate(&self, mode: usize, eta: f64, nbar_env: f64) -> CoreResult<Self> {
        mode_rows(mode, self.modes)?;
        if !(0.0..=1.0).contains(&eta) {
            return domain(format!("transmissivity must lie in [0, 1], got {eta}"));
        }
        let env = Self::from_gaussian(&GaussianState::thermal(nbar_env)?)?;
        let joint = Self::tensor(&[self.clone(), env])?;
        let n = self.modes + 1;
        let bs = crate::symplectic::beam_splitter(eta)?.embed(&[mode, n], n)?;
        joint.apply_symplectic(&bs)?.integrate_mode(n)
    }

    /// Unnormalized `∫ 2π F_n(x_k, p_k) W dx_k dp_k`.
    fn fock_projected(&self, mode: usize, n: usize) -> CoreResult<Self> {
        if n > FOCK_CUTOFF {
            return domain(format!("Fock number {n} exceeds cutoff {FOCK_CUTOFF}"));
        }
        let (a, b) = mode_rows(mode, self.modes)?;
        let nv = 2 * self.modes;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let lag = radial_laguerre(n, 2.0, nv, a, b);
        let center = DVector::zeros(2);
        let quad = DMatrix::identity(2, 2);
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let m = t.multiply(&[a, b], 2.0 * sign, &lag, &center, &quad)?;
            terms.push(m.marginalize(&[a, b])?);
        }
        Self::from_terms(self.modes - 1, terms)
    }

    fn branch(unnormalized: Self) -> CoreResult<(Self, f64)> {
        let p = unnormalized.norm;
        if !(p >= IMPROBABLE_THRESHOLD) {
            return Err(CoreError::ImprobableBranch { probability: p });
        }
        Ok((unnormalized.scaled(1.0 / p), p))
    }

    /// Projects `mode` onto Fock state `n`; returns the renormalized remainder and
    /// the herald probability.
    pub fn project_fock(&self, mode: usize, n: usize) -> CoreResult<(Self, f64)> {
        Self::branch(self.fock_projected(mode, n)?)
    }

    /// Unnormalized remainder and probability of the Fock-`n` herald, without the
    /// improbable-branch check.
    pub fn project_fock_raw(&self, mode: usize, n: usize) -> CoreResult<(Self, f64)> {
        let e = self.fock_projected(mode, n)?;
        let p = e.norm;
        Ok((e, p))
    }

    /// Complement of the Fock-`n` projection (`1 - 2πF_n`).
    pub fn project_not_fock(&self, mode: usize, n: usize) -> CoreResult<(Self, f64)> {
        let marginal = self.integrate_mode(mode)?;
        let hit = self.fock_projected(mode, n)?;
        Self::branch(marginal.plus(&hit.scaled(-1.0))?)
    }

    pub fn project_no_click(&self, mode: usize) -> CoreResult<(Self, f64)> {
        self.project_fock(mode, 0)
    }

    pub fn project_click(&self, mode: usize) -> CoreResult<(Self, f64)> {
        self.project_not_fock(mode, 0)
    }

    /// `G(l) = 2/(1+l) ∫ exp[(l-1)/(l+1) (x² + p²)] W` on one mode.
    pub fn generating_function(&self, mode: usize, l: f64) -> CoreResult<f64> {
        if !(l > -1.0 && l <= 1.0) {
            return domain(format!("generating function needs -1 < l <= 1, got {l}"));
        }
        let single = self.reduce_to(mode)?;
        Ok(single.generating_function_complex(Complex64::new(l, 0.0))?.re)
    }

    fn generating_function_complex(&self, l: Complex64) -> CoreResult<Complex64> {
        debug_assert_eq!(self.modes, 1);
        let s = (l - 1.0) / (l + 1.0);
        let pref = Complex64::new(2.0, 0.0) / (l + 1.0);
        let mut total = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let eig = t.quad.clone().symmetric_eigen();
            let v = eig.eigenvectors;
            let q = eig.eigenvalues;
            let u = v.transpose() * &t.mean;
            let rotated = t.poly.substitute_affine(&v, &DVector::zeros(2));
            let mut factor = Complex64::new(t.weight * PI * (q[0] * q[1]).sqrt(), 0.0);
            let mut mu = [Complex64::new(0.0, 0.0); 2];
            let mut var = [Complex64::new(0.0, 0.0); 2];
            let mut expo = Complex64::new(0.0, 0.0);
            for i in 0..2 {
                let d = Complex64::new(1.0, 0.0) - s * q[i];
                factor /= d.sqrt();
                expo += s * u[i] * u[i] / d;
                mu[i] = u[i] / d;
                var[i] = q[i] / (2.0 * d);
            }
            factor *= expo.exp();
            let deg = rotated.degree() as usize;
            let moments: Vec<Vec<Complex64>> = (0..2)
                .map(|i| {
                    let mut m = vec![Complex64::new(1.0, 0.0); deg + 1];
                    if deg >= 1 {
                        m[1] = mu[i];
                    }
                    for k in 2..=deg {
                        m[k] = mu[i] * m[k - 1] + var[i] * (k as f64 - 1.0) * m[k - 2];
                    }
                    m
                })
                .collect();
            let mut ev = Complex64::new(0.0, 0.0);
            for (e, &c) in rotated.iter() {
                ev += moments[0][e[0] as usize] * moments[1][e[1] as usize] * c;
            }
            total += factor * ev;
        }
        Ok(pref * total)
    }

    /// `P(n)` for `n = 0..=n_max`, read off as Taylor coefficients of the generating
    /// function by a discrete Cauchy integral on a circle inside the unit disk.
    pub fn photon_number_distribution(&self, mode: usize, n_max: usize) -> CoreResult<PhotonNumberDistribution> {
        let single = self.reduce_to(mode)?;
        let k = (8 * (n_max + 1)).max(256);
        // ρ^n_max ≈ 1e-2 bounds rounding amplification; ρ^k stays far below 1e-14.
        let rho = (1e-2f64).powf(1.0 / n_max.max(1) as f64).min(0.9);
        let values: Vec<Complex64> = (0..k)
            .map(|j| {
                let ang = 2.0 * PI * j as f64 / k as f64;
                single.generating_function_complex(Complex64::from_polar(rho, ang))
            })
            .collect::<CoreResult<_>>()?;
        let norm = single.norm;
        let mut probs = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut acc = 0.0;
            for (j, g) in values.iter().enumerate() {
                let ang = -2.0 * PI * ((j * n) % k) as f64 / k as f64;
                acc += (g * Complex64::from_polar(1.0, ang)).re;
            }
            let p = acc / k as f64 / rho.powi(n as i32) / norm;
            if !(-DISTRIBUTION_EPS..=1.0 + DISTRIBUTION_EPS).contains(&p) {
                return Err(CoreError::NumericalConditioning(format!("P({n}) = {p:e} outside [0, 1]")));
            }
            probs.push(p.clamp(0.0, 1.0));
        }
        let tail = 1.0 - probs.iter().sum::<f64>();
        Ok(PhotonNumberDistribution { probs, n_max, tail })
    }

    /// `∫ W₁ W₂ dX`.
    pub fn overlap(&self, other: &Self) -> CoreResult<f64> {
        if self.modes != other.modes {
            return Err(CoreError::DimensionMismatch { expected: self.modes, got: other.modes });
        }
        let mut acc = 0.0;
        for a in &self.terms {
            for b in &other.terms {
                acc += a.product(b)?.integral_with(None)?;
            }
        }
        Ok(acc)
    }

    /// `(2π)^N ∫ W²`.
    pub fn purity(&self) -> CoreResult<f64> {
        Ok((2.0 * PI).powi(self.modes as i32) * self.overlap(self)?)
    }

    /// Samples a single-mode expression on a rectangular grid as `(x, p, W)` rows.
    pub fn sample_grid(&self, x: (f64, f64, usize), p: (f64, f64, usize)) -> CoreResult<Vec<(f64, f64, f64)>> {
        if self.modes != 1 {
            return domain("grid sampling needs a single-mode expression");
        }
        let axis = |(lo, hi, n): (f64, f64, usize)| -> Vec<f64> {
            if n <= 1 {
                vec![lo]
            } else {
                (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
            }
        };
        let mut out = Vec::new();
        for &xv in &axis(x) {
            for &pv in &axis(p) {
                out.push((xv, pv, self.evaluate(&[xv, pv])?));
            }
        }
        Ok(out)
    }

    /// Writes [`Self::sample_grid`] output as CSV with an `x,p,W` header.
    pub fn write_grid_csv<W: std::io::Write>(&self, mut w: W, x: (f64, f64, usize), p: (f64, f64, usize)) -> CoreResult<()> {
        let io = |e: std::io::Error| CoreError::NumericalConditioning(format!("grid export failed: {e}"));
        writeln!(w, "x,p,W").map_err(io)?;
        for (xv, pv, wv) in self.sample_grid(x, p)? {
            writeln!(w, "{xv:.17e},{pv:.17e},{wv:.17e}").map_err(io)?;
        }
        Ok(())
    }
}
