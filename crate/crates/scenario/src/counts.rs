//! Simulated heralded photon counting with a fixed number of attempts per grid point.

use mzsim_core::measure;
use rand_distr::{Binomial, Distribution, WeightedIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Modification, Parameter, ScenarioConfig, Stage};
use crate::drift::substream;
use crate::error::{ScenarioError, ScenarioResult};
use crate::pipeline::{evaluate, is_soft};

/// Tail mass beyond `n_max` above which the sampled distribution is reported as truncated.
const TAIL_WARNING: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountsFlag {
    Ok,
    /// No attempt was kept.
    NoKept,
    /// One kept sample: mean only, no spread.
    SingleKept,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsRow {
    pub index: usize,
    pub m: Option<usize>,
    pub transmissivity: Option<f64>,
    pub trials: u64,
    pub p_success: f64,
    pub kept: u64,
    pub expected_kept: f64,
    /// Binomial standard deviation of the kept count.
    pub kept_sigma: f64,
    pub sample_mean: Option<f64>,
    pub sample_snr: Option<f64>,
    pub model_mean: Option<f64>,
    pub model_snr: Option<f64>,
    pub flag: CountsFlag,
    pub warnings: Vec<String>,
}

fn heralded(cfg: &ScenarioConfig) -> Option<Modification> {
    cfg.heralds().next().map(|(_, m)| *m)
}

/// Grid points as `(m, T)` overrides, m-major.
fn grid(cfg: &ScenarioConfig) -> Vec<(Option<usize>, Option<f64>)> {
    let spec = cfg.counts.as_ref().expect("counts section");
    let ms: Vec<Option<usize>> = if spec.m.is_empty() { vec![None] } else { spec.m.iter().map(|&m| Some(m)).collect() };
    let ts: Vec<Option<f64>> = match &spec.transmissivity {
        Some(g) => g.points().into_iter().map(Some).collect(),
        None => vec![None],
    };
    ms.iter().flat_map(|&m| ts.iter().map(move |&t| (m, t))).collect()
}

pub fn run_counts(cfg: &ScenarioConfig) -> ScenarioResult<Vec<CountsRow>> {
    if cfg.counts.is_none() {
        return Err(ScenarioError::config("counts", "missing counts section"));
    }
    grid(cfg).par_iter().enumerate().map(|(i, &(m, t))| counts_point(cfg, i, m, t)).collect()
}

fn counts_point(cfg: &ScenarioConfig, index: usize, m: Option<usize>, t: Option<f64>) -> ScenarioResult<CountsRow> {
    let spec = cfg.counts.as_ref().expect("counts section");
    let mut c = cfg.clone();
    if let Some(m) = m {
        c = c.with_parameter(Parameter::M, m as f64)?;
    }
    if let Some(t) = t {
        c = c.with_parameter(Parameter::T, t)?;
    }
    let herald = heralded(&c);
    let mode = spec.mode.or(herald.map(|h| h.mode())).unwrap_or(1);
    // Added photons reach the counter directly only without an interferometer in between.
    let injected = match herald {
        Some(Modification::Add { mode: am, m, stage, .. }) if am == mode && (stage == Stage::Output || c.interferometer.is_none()) => m,
        _ => 0,
    };
    let mut rng = substream(cfg.seed, index as u64);
    let mut row = CountsRow {
        index,
        m,
        transmissivity: t,
        trials: spec.trials,
        p_success: 0.0,
        kept: 0,
        expected_kept: 0.0,
        kept_sigma: 0.0,
        sample_mean: None,
        sample_snr: None,
        model_mean: None,
        model_snr: None,
        flag: CountsFlag::NoKept,
        warnings: Vec::new(),
    };
    let ev = match evaluate(&c, None, false) {
        Ok(ev) => ev,
        Err(e) if is_soft(&e) => {
            row.warnings.push(e.to_string());
            return Ok(row);
        }
        Err(e) => return Err(e.into()),
    };
    let p = ev.probability.clamp(0.0, 1.0);
    row.p_success = p;
    row.expected_kept = spec.trials as f64 * p;
    row.kept_sigma = (spec.trials as f64 * p * (1.0 - p)).sqrt();
    let model = match &ev.state {
        crate::pipeline::State::Gaussian(g) => measure::intensity(g, mode)?,
        crate::pipeline::State::Wigner(w) => measure::intensity(w, mode)?,
    };
    row.model_mean = Some(model.mean);
    if model.variance > 0.0 {
        row.model_snr = Some((model.mean - injected as f64) / model.variance.sqrt());
    }

    let binomial = Binomial::new(spec.trials, p).map_err(|e| ScenarioError::Output(e.to_string()))?;
    let kept = binomial.sample(&mut rng);
    row.kept = kept;
    if kept == 0 {
        return Ok(row);
    }
    let dist = ev.state.to_wigner()?.photon_number_distribution(mode, c.n_max)?;
    if dist.tail > TAIL_WARNING {
        row.warnings.push(format!("probability {:.3e} beyond n_max = {} is not sampled", dist.tail, c.n_max));
    }
    let sampler = WeightedIndex::new(&dist.probs).map_err(|e| ScenarioError::Output(e.to_string()))?;
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..kept {
        let n = sampler.sample(&mut rng) as f64;
        s1 += n;
        s2 += n * n;
    }
    let k = kept as f64;
    let mean = s1 / k;
    row.sample_mean = Some(mean);
    if kept == 1 {
        row.flag = CountsFlag::SingleKept;
        return Ok(row);
    }
    let var = ((s2 - k * mean * mean) / (k - 1.0)).max(0.0);
    if var > 0.0 {
        row.sample_snr = Some((mean - injected as f64) / var.sqrt());
    }
    row.flag = CountsFlag::Ok;
    Ok(row)
}
