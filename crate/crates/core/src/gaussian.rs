//! Gaussian states: mean vector plus covariance matrix, with the convention
//! `σ_ij = ⟨{R_i, R_j}⟩ - 2⟨R_i⟩⟨R_j⟩`, so that the vacuum has `σ = I`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{domain, CoreError, CoreResult};
use crate::symplectic::{self, mode_rows, omega, QuadratureVector, SymplecticTransform};

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const BONA_FIDE_TOL: f64 = 1e-9;

/// Checks symmetry, positive definiteness and `σ + iΩ ⪰ 0`.
pub fn validate_covariance(cov: &DMatrix<f64>) -> CoreResult<()> {
    let n = cov.nrows();
    if n == 0 || n % 2 != 0 || cov.ncols() != n {
        return domain(format!("covariance must be square with even dimension, got {}x{}", n, cov.ncols()));
    }
    if cov.iter().any(|v| !v.is_finite()) {
        return domain("covariance has non-finite entries");
    }
    let scale = cov.amax().max(1.0);
    let asym = (cov - cov.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return domain(format!("covariance is not symmetric (defect {asym:e})"));
    }
    if cov.clone().cholesky().is_none() {
        return domain("covariance is not positive definite");
    }
    // σ + iΩ as a real symmetric matrix [[σ, -Ω], [Ω, σ]]; eigenvalues appear twice.
    let om = omega(n / 2);
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(cov);
    big.view_mut((n, n), (n, n)).copy_from(cov);
    big.view_mut((0, n), (n, n)).copy_from(&(-&om));
    big.view_mut((n, 0), (n, n)).copy_from(&om);
    let sym = (&big + big.transpose()) * 0.5;
    let min = sym.symmetric_eigenvalues().min();
    if min < -BONA_FIDE_TOL * scale {
        return domain(format!("covariance violates the uncertainty principle (min eigenvalue {min:e})"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    /// Internal loss fraction `L`.
    pub internal: f64,
    /// Detector efficiency `D`.
    pub detector: f64,
}

impl Default for LossSpec {
    fn default() -> Self {
        Self { internal: 0.0, detector: 1.0 }
    }
}

impl LossSpec {
    pub fn new(internal: f64, detector: f64) -> CoreResult<Self> {
        let s = Self { internal, detector };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> CoreResult<()> {
        if !(0.0..=1.0).contains(&self.internal) || !(0.0..=1.0).contains(&self.detector) {
            return domain(format!(
                "loss parameters must lie in [0, 1], got L={} D={}",
                self.internal, self.detector
            ));
        }
        Ok(())
    }

    /// Combined loss `1 - D(1 - L)`.
    pub fn total(&self) -> f64 {
        1.0 - self.detector * (1.0 - self.internal)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub mean: QuadratureVector,
    pub cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn new(mean: QuadratureVector, cov: DMatrix<f64>) -> CoreResult<Self> {
        validate_covariance(&cov)?;
        if mean.len() != cov.nrows() {
            return Err(CoreError::DimensionMismatch { expected: cov.nrows(), got: mean.len() });
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return domain("mean has non-finite entries");
        }
        Ok(Self { mean, cov })
    }

    pub fn modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn vacuum(modes: usize) -> CoreResult<Self> {
        if modes == 0 {
            return domain("a state needs at least one mode");
        }
        Ok(Self { mean: DVector::zeros(2 * modes), cov: DMatrix::identity(2 * modes, 2 * modes) })
    }

    pub fn coherent(amplitude: f64, theta: f64) -> CoreResult<Self> {
        let d = symplectic::displacement(amplitude, theta)?;
        Ok(Self { mean: d.shift_or_zero(), cov: DMatrix::identity(2, 2) })
    }

    /// Thermal state with true mean photon number `nbar` (covariance `(2n̄+1)I`).
    pub fn thermal(nbar: f64) -> CoreResult<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return domain(format!("mean photon number must be finite and >= 0, got {nbar}"));
        }
        Ok(Self { mean: DVector::zeros(2), cov: DMatrix::identity(2, 2) * (2.0 * nbar + 1.0) })
    }

    pub fn squeezed_vacuum(r: f64, theta: f64) -> CoreResult<Self> {
        let s = symplectic::squeezer(r, theta)?;
        Self::vacuum(1)?.propagate(&s)
    }

    /// Ordered tensor product; the first state occupies mode 1.
    pub fn tensor(states: &[GaussianState]) -> CoreResult<Self> {
        if states.is_empty() {
            return domain("tensor product of an empty list");
        }
        let n: usize = states.iter().map(|s| s.mean.len()).sum();
        let mut mean = DVector::zeros(n);
        let mut cov = DMatrix::zeros(n, n);
        let mut at = 0;
        for s in states {
            let d = s.mean.len();
            mean.rows_mut(at, d).copy_from(&s.mean);
            cov.view_mut((at, at), (d, d)).copy_from(&s.cov);
            at += d;
        }
        Ok(Self { mean, cov })
    }

    pub fn propagate(&self, f: &SymplecticTransform) -> CoreResult<Self> {
        if f.dim() != self.mean.len() {
            return Err(CoreError::DimensionMismatch { expected: self.mean.len(), got: f.dim() });
        }
        let mean = f.apply(&self.mean);
        let cov = &f.matrix * &self.cov * f.matrix.transpose();
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self { mean, cov })
    }

    /// Uniform loss on every mode with combined factor `1 - D(1 - L)`.
    pub fn apply_loss(&self, spec: &LossSpec) -> CoreResult<Self> {
        spec.validate()?;
        let l = spec.total();
        let n = self.mean.len();
        Ok(Self {
            mean: &self.mean * (1.0 - l).sqrt(),
            cov: &self.cov * (1.0 - l) + DMatrix::identity(n, n) * l,
        })
    }

    /// Loss on one mode through a beam splitter with a vacuum ancilla.
    pub fn apply_loss_explicit(&self, mode: usize, eta: f64) -> CoreResult<Self> {
        self.inject_thermal(mode, 0.0, eta)
    }

    /// Mixes one mode with a thermal ancilla of mean photon `nbar_env` on `BS(η)`
    /// and traces the ancilla out.
    pub fn inject_thermal(&self, mode: usize, nbar_env: f64, eta: f64) -> CoreResult<Self> {
        let n = self.modes();
        mode_rows(mode, n)?;
        let ancilla = Self::thermal(nbar_env)?;
        let bs = symplectic::beam_splitter(eta)?.embed(&[mode, n + 1], n + 1)?;
        let joint = Self::tensor(&[self.clone(), ancilla])?.propagate(&bs)?;
        joint.reduced(&(1..=n).collect::<Vec<_>>())
    }

    /// Marginal state on the listed modes (1-based), in the listed order.
    pub fn reduced(&self, modes: &[usize]) -> CoreResult<Self> {
        if modes.is_empty() {
            return domain("reduced state needs at least one mode");
        }
        let mut rows = Vec::with_capacity(2 * modes.len());
        for &m in modes {
            let (a, b) = mode_rows(m, self.modes())?;
            rows.push(a);
            rows.push(b);
        }
        let k = rows.len();
        let mean = DVector::from_fn(k, |i, _| self.mean[rows[i]]);
        let cov = DMatrix::from_fn(k, k, |i, j| self.cov[(rows[i], rows[j])]);
        Ok(Self { mean, cov })
    }

    /// `½(Tr σ_k / 2 + ⟨x⟩² + ⟨p⟩² - 1)`.
    pub fn mean_photon(&self, mode: usize) -> CoreResult<f64> {
        let (a, b) = mode_rows(mode, self.modes())?;
        let tr = self.cov[(a, a)] + self.cov[(b, b)];
        Ok(0.5 * (tr / 2.0 + self.mean[a].powi(2) + self.mean[b].powi(2) - 1.0))
    }

    pub fn total_mean_photon(&self) -> f64 {
        (1..=self.modes()).map(|m| self.mean_photon(m).unwrap_or(0.0)).sum()
    }

    /// `1 / √det σ`.
    pub fn purity(&self) -> f64 {
        1.0 / self.cov.determinant().sqrt()
    }
}
