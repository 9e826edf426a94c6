//! Phase-drift Monte Carlo: each trial evaluates the phase variance at a phase
//! drawn around the scheme's optimum and the running mean is reported.

use mzsim_core::estimation::phase_variance_at;
use mzsim_core::DetectionScheme;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{DriftDistribution, DriftSpec, ScenarioConfig};
use crate::error::{ScenarioError, ScenarioResult};
use crate::pipeline::{is_soft, optimal_phase, scheme_moments};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftTrial {
    pub k: usize,
    pub phi: f64,
    /// Missing when the signal is stationary at the drawn phase.
    pub phase_variance: Option<f64>,
    pub running_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftTrace {
    pub scheme: String,
    pub distribution: DriftDistribution,
    pub phi_opt: f64,
    pub optimal_phase_variance: f64,
    /// Standard deviation for Gaussian drift, relative half-width for uniform drift.
    pub spread: f64,
    /// Draws where the signal slope vanished; they carry no phase information and
    /// are left out of the running mean.
    pub stationary_draws: usize,
    pub trials: Vec<DriftTrial>,
}

pub fn spread_for(spec: &DriftSpec, scheme: &DetectionScheme) -> f64 {
    match spec.distribution {
        DriftDistribution::Gaussian if matches!(scheme, DetectionScheme::Parity { .. }) => spec.sigma_parity,
        DriftDistribution::Gaussian => spec.sigma_other,
        DriftDistribution::Uniform => spec.uniform_fraction,
    }
}

/// RNG for substream `index` of `seed`; streams are independent of scheduling.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn run_drift(cfg: &ScenarioConfig) -> ScenarioResult<Vec<DriftTrace>> {
    let spec = cfg.drift.ok_or_else(|| ScenarioError::config("drift", "missing drift section"))?;
    cfg.detection.par_iter().enumerate().map(|(i, scheme)| drift_trace(cfg, &spec, scheme, i as u64)).collect()
}

fn drift_trace(cfg: &ScenarioConfig, spec: &DriftSpec, scheme: &DetectionScheme, stream: u64) -> ScenarioResult<DriftTrace> {
    let best = optimal_phase(cfg, scheme)?;
    let spread = spread_for(spec, scheme);
    let mut rng = substream(cfg.seed, stream);
    let normal = Normal::new(best.phi, spread).map_err(|e| ScenarioError::config("drift", e.to_string()))?;
    let lo = best.phi * (1.0 - spread);
    let hi = best.phi * (1.0 + spread);
    let uniform = (hi > lo).then(|| Uniform::new(lo, hi));
    let moments = scheme_moments(cfg, scheme);
    let mut trials = Vec::with_capacity(spec.trials);
    let (mut sum, mut count, mut stationary) = (0.0, 0usize, 0usize);
    for k in 1..=spec.trials {
        let phi = match spec.distribution {
            DriftDistribution::Gaussian => normal.sample(&mut rng),
            DriftDistribution::Uniform => uniform.map_or(best.phi, |u| u.sample(&mut rng)),
        };
        let v = match phase_variance_at(&moments, phi) {
            Ok(v) => Some(v),
            Err(e) if is_soft(&e) => None,
            Err(e) => return Err(e.into()),
        };
        match v {
            Some(v) => {
                sum += v;
                count += 1;
            }
            None => stationary += 1,
        }
        let running_mean = (count > 0).then(|| sum / count as f64);
        trials.push(DriftTrial { k, phi, phase_variance: v, running_mean });
    }
    Ok(DriftTrace {
        scheme: scheme.name(),
        distribution: spec.distribution,
        phi_opt: best.phi,
        optimal_phase_variance: best.value,
        spread,
        stationary_draws: stationary,
        trials,
    })
}
