//! Closed-form statistics of photon-added coherent and photon-subtracted thermal
//! states, used as references for the heralded models.

use crate::error::{domain, CoreResult};
use crate::poly::laguerre;

fn check_t(t: f64) -> CoreResult<()> {
    if !(0.0..=1.0).contains(&t) {
        return domain(format!("transmissivity must lie in [0, 1], got {t}"));
    }
    Ok(())
}

fn check_nonneg(name: &str, v: f64) -> CoreResult<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return domain(format!("{name} must be finite and >= 0, got {v}"));
    }
    Ok(())
}

/// Mean photon number of an `m`-photon-added coherent state with amplitude `√T α`.
pub fn spacs_mean_n(alpha_sq: f64, m: usize, t: f64) -> CoreResult<f64> {
    check_nonneg("|α|²", alpha_sq)?;
    check_t(t)?;
    if m == 0 {
        return Ok(t * alpha_sq);
    }
    let x = -t * alpha_sq;
    Ok(t * alpha_sq + 2.0 * m as f64 - m as f64 * laguerre(m - 1, x) / laguerre(m, x))
}

/// Second moment `⟨n̂²⟩` of the same state.
pub fn spacs_second_moment(alpha_sq: f64, m: usize, t: f64) -> CoreResult<f64> {
    check_nonneg("|α|²", alpha_sq)?;
    check_t(t)?;
    let x = -t * alpha_sq;
    let m_f = m as f64;
    let lm = laguerre(m, x);
    Ok(((m_f + 2.0) * (m_f + 1.0) * laguerre(m + 2, x) - 3.0 * (m_f + 1.0) * laguerre(m + 1, x) + lm) / lm)
}

/// Herald probability of beam-splitter photon addition on a coherent state.
pub fn spacs_prob(alpha_sq: f64, m: usize, t: f64) -> CoreResult<f64> {
    check_nonneg("|α|²", alpha_sq)?;
    check_t(t)?;
    Ok((1.0 - t).powi(m as i32) * (alpha_sq * (t - 1.0)).exp() * laguerre(m, -t * alpha_sq))
}

/// SNR with the `m` injected photons removed from the signal.
pub fn spacs_snr(alpha_sq: f64, m: usize, t: f64) -> CoreResult<f64> {
    let n = spacs_mean_n(alpha_sq, m, t)?;
    let n2 = spacs_second_moment(alpha_sq, m, t)?;
    Ok((n - m as f64) / (n2 - n * n).sqrt())
}

/// `√(n̄ / (n̄ + 1))`.
pub fn thermal_snr(nbar: f64) -> CoreResult<f64> {
    check_nonneg("n̄", nbar)?;
    Ok((nbar / (nbar + 1.0)).sqrt())
}

/// Mean photon number of an `m`-photon-subtracted thermal state.
pub fn spsts_mean_n(nbar: f64, m: usize, t: f64) -> CoreResult<f64> {
    check_nonneg("n̄", nbar)?;
    check_t(t)?;
    Ok((m as f64 + 1.0) * nbar * t / (nbar * (1.0 - t) + 1.0))
}

/// Herald probability of subtracting `m` photons from a thermal state.
pub fn spsts_prob(nbar: f64, m: usize, t: f64) -> CoreResult<f64> {
    check_nonneg("n̄", nbar)?;
    check_t(t)?;
    let a = nbar * (1.0 - t);
    Ok(a.powi(m as i32) / (a + 1.0).powi(m as i32 + 1))
}

/// `√(T(m+1))` times the thermal SNR.
pub fn spsts_snr(nbar: f64, m: usize, t: f64) -> CoreResult<f64> {
    check_t(t)?;
    Ok((t * (m as f64 + 1.0)).sqrt() * thermal_snr(nbar)?)
}

/// Mean photon number reaching output 1 of the interferometer for a thermal input.
pub fn mzi_thermal_output(nbar: f64, phi: f64) -> f64 {
    nbar * (phi / 2.0).cos().powi(2)
}

/// Probability of subtracting `m` photons after the interferometer.
pub fn mzi_sub_prob_m(nbar: f64, m: usize, t: f64, phi: f64) -> CoreResult<f64> {
    check_nonneg("n̄", nbar)?;
    spsts_prob(mzi_thermal_output(nbar, phi), m, t)
}

/// Click-herald subtraction probability after the interferometer.
pub fn mzi_sub_prob_click(nbar: f64, t: f64, phi: f64) -> CoreResult<f64> {
    check_nonneg("n̄", nbar)?;
    check_t(t)?;
    let mu = mzi_thermal_output(nbar, phi);
    Ok(1.0 + 1.0 / (mu * (t - 1.0) - 1.0))
}

pub fn mzi_sub_mean_n(nbar: f64, m: usize, t: f64, phi: f64) -> CoreResult<f64> {
    check_nonneg("n̄", nbar)?;
    spsts_mean_n(mzi_thermal_output(nbar, phi), m, t)
}

pub fn mzi_sub_snr(nbar: f64, m: usize, t: f64, phi: f64) -> CoreResult<f64> {
    check_nonneg("n̄", nbar)?;
    spsts_snr(mzi_thermal_output(nbar, phi), m, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    SpacsMeanN,
    SpacsSecondMoment,
    SpacsProb,
    SpacsSnr,
    SpstsMeanN,
    SpstsProb,
    SpstsSnr,
    MziSubProbM,
    MziSubProbClick,
    MziSubMeanN,
    MziSubSnr,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReferenceParams {
    /// `|α|²` for the coherent family, `n̄` for the thermal family.
    pub intensity: f64,
    pub m: usize,
    pub t: f64,
    pub phi: f64,
}

pub fn reference_stats(kind: ReferenceKind, p: ReferenceParams) -> CoreResult<f64> {
    match kind {
        ReferenceKind::SpacsMeanN => spacs_mean_n(p.intensity, p.m, p.t),
        ReferenceKind::SpacsSecondMoment => spacs_second_moment(p.intensity, p.m, p.t),
        ReferenceKind::SpacsProb => spacs_prob(p.intensity, p.m, p.t),
        ReferenceKind::SpacsSnr => spacs_snr(p.intensity, p.m, p.t),
        ReferenceKind::SpstsMeanN => spsts_mean_n(p.intensity, p.m, p.t),
        ReferenceKind::SpstsProb => spsts_prob(p.intensity, p.m, p.t),
        ReferenceKind::SpstsSnr => spsts_snr(p.intensity, p.m, p.t),
        ReferenceKind::MziSubProbM => mzi_sub_prob_m(p.intensity, p.m, p.t, p.phi),
        ReferenceKind::MziSubProbClick => mzi_sub_prob_click(p.intensity, p.t, p.phi),
        ReferenceKind::MziSubMeanN => mzi_sub_mean_n(p.intensity, p.m, p.t, p.phi),
        ReferenceKind::MziSubSnr => mzi_sub_snr(p.intensity, p.m, p.t, p.phi),
    }
}
