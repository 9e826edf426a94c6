//! Detection statistics on Gaussian states and Wigner expressions.
//!
//! Operator moments are computed from symmetrically ordered phase-space integrals;
//! the ordering corrections for `n̂` and `n̂²` are applied explicitly.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, CoreError, CoreResult};
use crate::gaussian::GaussianState;
use crate::poly::Poly;
use crate::symplectic::mode_rows;
use crate::wigner::WignerExpr;

pub const VARIANCE_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementMoments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

impl MeasurementMoments {
    /// Derives the variance, clamping rounding residue down to `-1e-10` at zero.
    pub fn new(mean: f64, second_moment: f64) -> CoreResult<Self> {
        let v = second_moment - mean * mean;
        let scale = second_moment.abs().max(1.0);
        if !v.is_finite() || v < -VARIANCE_CLAMP * scale {
            return Err(CoreError::NumericalConditioning(format!("negative variance {v:e}")));
        }
        Ok(Self { mean, second_moment, variance: v.max(0.0) })
    }
}

/// Primitive phase-space quantities that the two state representations compute differently.
pub trait Measurable {
    fn mode_count(&self) -> usize;

    /// `∫ P(X) W(X) dX` over all `2N` variables.
    fn phase_space_average(&self, poly: &Poly) -> CoreResult<f64>;

    /// `π W(0, 0)` of the single-mode marginal.
    fn parity_value(&self, mode: usize) -> CoreResult<f64>;

    /// Probability of registering no photons on `mode`.
    fn vacuum_probability(&self, mode: usize) -> CoreResult<f64>;

    /// `⟨n̂⟩` on `mode`.
    fn photon_mean(&self, mode: usize) -> CoreResult<f64> {
        let (a, b) = mode_rows(mode, self.mode_count())?;
        let s = self.phase_space_average(&radius_squared(self.mode_count(), a, b))?;
        Ok(0.5 * s - 0.5)
    }
}

fn radius_squared(modes: usize, a: usize, b: usize) -> Poly {
    let n = 2 * modes;
    let mut p = Poly::zero(n);
    let mut ea = vec![0; n];
    ea[a] = 2;
    p.add_term(ea, 1.0);
    let mut eb = vec![0; n];
    eb[b] = 2;
    p.add_term(eb, 1.0);
    p
}

impl Measurable for GaussianState {
    fn mode_count(&self) -> usize {
        self.modes()
    }

    fn phase_space_average(&self, poly: &Poly) -> CoreResult<f64> {
        if poly.nvars() != self.mean.len() {
            return Err(CoreError::DimensionMismatch { expected: self.mean.len(), got: poly.nvars() });
        }
        Ok(poly.gaussian_expectation(&self.mean, &(&self.cov * 0.5)))
    }

    fn parity_value(&self, mode: usize) -> CoreResult<f64> {
        let m = self.reduced(&[mode])?;
        let inv = m
            .cov
            .clone()
            .try_inverse()
            .ok_or_else(|| CoreError::NumericalConditioning("singular covariance".into()))?;
        let q = (m.mean.transpose() * inv * &m.mean)[(0, 0)];
        Ok((-q).exp() / m.cov.determinant().sqrt())
    }

    fn vacuum_probability(&self, mode: usize) -> CoreResult<f64> {
        let m = self.reduced(&[mode])?;
        let s = &m.cov + DMatrix::identity(2, 2);
        let inv = s.clone().try_inverse().ok_or_else(|| CoreError::NumericalConditioning("singular covariance".into()))?;
        let q = (m.mean.transpose() * inv * &m.mean)[(0, 0)];
        Ok(2.0 * (-q).exp() / s.determinant().sqrt())
    }

    fn photon_mean(&self, mode: usize) -> CoreResult<f64> {
        self.mean_photon(mode)
    }
}

impl Measurable for WignerExpr {
    fn mode_count(&self) -> usize {
        self.modes()
    }

    fn phase_space_average(&self, poly: &Poly) -> CoreResult<f64> {
        self.expectation(poly)
    }

    fn parity_value(&self, mode: usize) -> CoreResult<f64> {
        Ok(PI * self.reduce_to(mode)?.evaluate(&[0.0, 0.0])?)
    }

    fn vacuum_probability(&self, mode: usize) -> CoreResult<f64> {
        let single = self.reduce_to(mode)?;
        Ok(single.project_fock_raw(1, 0)?.1)
    }
}

/// `n̂` on one mode: mean `½∫(x²+p²)W - ½`, second moment `¼∫(x²+p²)²W - ⟨n⟩ - ½`.
pub fn intensity<S: Measurable + ?Sized>(state: &S, mode: usize) -> CoreResult<MeasurementMoments> {
    let (a, b) = mode_rows(mode, state.mode_count())?;
    let r2 = radius_squared(state.mode_count(), a, b);
    let mean = state.photon_mean(mode)?;
    let s2 = state.phase_space_average(&r2.mul(&r2))?;
    MeasurementMoments::new(mean, 0.25 * s2 - mean - 0.5)
}

/// Quadrature `x cos θ + p sin θ` on one mode.
pub fn homodyne<S: Measurable + ?Sized>(state: &S, mode: usize, theta: f64) -> CoreResult<MeasurementMoments> {
    let (a, b) = mode_rows(mode, state.mode_count())?;
    let n = 2 * state.mode_count();
    let mut coeffs = vec![0.0; n];
    coeffs[a] = theta.cos();
    coeffs[b] = theta.sin();
    let r = Poly::linear(&coeffs, 0.0);
    let mean = state.phase_space_average(&r)?;
    let second = state.phase_space_average(&r.mul(&r))?;
    MeasurementMoments::new(mean, second)
}

/// Photon-number parity; `⟨Π̂²⟩ = 1`.
pub fn parity<S: Measurable + ?Sized>(state: &S, mode: usize) -> CoreResult<MeasurementMoments> {
    let mean = state.parity_value(mode)?;
    MeasurementMoments::new(mean, 1.0)
}

/// `n̂_a - n̂_b` on two distinct modes.
pub fn intensity_difference<S: Measurable + ?Sized>(state: &S, mode_a: usize, mode_b: usize) -> CoreResult<MeasurementMoments> {
    if mode_a == mode_b {
        return domain("intensity difference needs two distinct modes");
    }
    let na = intensity(state, mode_a)?;
    let nb = intensity(state, mode_b)?;
    let (a0, a1) = mode_rows(mode_a, state.mode_count())?;
    let (b0, b1) = mode_rows(mode_b, state.mode_count())?;
    let m = state.mode_count();
    let half = Poly::constant(2 * m, -0.5);
    let mut sa = radius_squared(m, a0, a1).scaled(0.5);
    sa.add_scaled(&half, 1.0);
    let mut sb = radius_squared(m, b0, b1).scaled(0.5);
    sb.add_scaled(&half, 1.0);
    // Operators on different modes commute, so the product of their Weyl symbols is exact.
    let cross = state.phase_space_average(&sa.mul(&sb))?;
    MeasurementMoments::new(na.mean - nb.mean, na.second_moment + nb.second_moment - 2.0 * cross)
}

/// `1 - P(0)`.
pub fn click_probability<S: Measurable + ?Sized>(state: &S, mode: usize) -> CoreResult<f64> {
    let p = 1.0 - state.vacuum_probability(mode)?;
    Ok(p.clamp(0.0, 1.0))
}

/// Click detector as a Bernoulli observable.
pub fn click<S: Measurable + ?Sized>(state: &S, mode: usize) -> CoreResult<MeasurementMoments> {
    let p = click_probability(state, mode)?;
    MeasurementMoments::new(p, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DetectionScheme {
    Intensity { mode: usize },
    Homodyne { mode: usize, angle: f64 },
    Parity { mode: usize },
    IntensityDifference { mode_a: usize, mode_b: usize },
    Click { mode: usize },
}

impl DetectionScheme {
    pub fn name(&self) -> String {
        match self {
            Self::Intensity { mode } => format!("intensity_{mode}"),
            Self::Homodyne { mode, .. } => format!("homodyne_{mode}"),
            Self::Parity { mode } => format!("parity_{mode}"),
            Self::IntensityDifference { mode_a, mode_b } => format!("difference_{mode_a}_{mode_b}"),
            Self::Click { mode } => format!("click_{mode}"),
        }
    }

    pub fn modes(&self) -> Vec<usize> {
        match *self {
            Self::Intensity { mode } | Self::Homodyne { mode, .. } | Self::Parity { mode } | Self::Click { mode } => vec![mode],
            Self::IntensityDifference { mode_a, mode_b } => vec![mode_a, mode_b],
        }
    }

    pub fn measure<S: Measurable + ?Sized>(&self, state: &S) -> CoreResult<MeasurementMoments> {
        match *self {
            Self::Intensity { mode } => intensity(state, mode),
            Self::Homodyne { mode, angle } => homodyne(state, mode, angle),
            Self::Parity { mode } => parity(state, mode),
            Self::IntensityDifference { mode_a, mode_b } => intensity_difference(state, mode_a, mode_b),
            Self::Click { mode } => click(state, mode),
        }
    }
}
