use mzsim::config::{CountsSpec, DriftDistribution, DriftSpec};
use mzsim::counts::{run_counts, CountsFlag};
use mzsim::drift::run_drift;
use mzsim::ScenarioConfig;

const HOMODYNE: &str = r#"
seed = 5
inputs = [{ kind = "coherent", amplitude = 10.0 }, { kind = "vacuum" }]
modifications = [{ op = "squeeze", mode = 2, r = 1.0 }]
interferometer = { phi = 1.5 }
detection = [{ kind = "homodyne", mode = 1, angle = 0.0 }]
"#;

fn drift_cfg(spec: DriftSpec) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::from_toml(HOMODYNE).unwrap();
    cfg.drift = Some(spec);
    cfg.validate().unwrap();
    cfg
}

#[test]
fn zero_drift_stays_at_the_optimum() {
    let cfg = drift_cfg(DriftSpec { trials: 50, sigma_other: 0.0, ..DriftSpec::default() });
    let trace = &run_drift(&cfg).unwrap()[0];
    for t in &trace.trials {
        assert_eq!(t.phi, trace.phi_opt);
        let m = t.running_mean.unwrap();
        assert!((m - trace.optimal_phase_variance).abs() <= 1e-12 * trace.optimal_phase_variance);
    }
}

#[test]
fn running_mean_settles() {
    let cfg = drift_cfg(DriftSpec { trials: 2000, sigma_other: 0.15, ..DriftSpec::default() });
    let trace = &run_drift(&cfg).unwrap()[0];
    assert_eq!(trace.stationary_draws, 0);
    let means: Vec<f64> = trace.trials.iter().map(|t| t.running_mean.unwrap()).collect();
    let last = *means.last().unwrap();
    // Cauchy criterion over the last decade of trials.
    let spread = means[1800..].iter().map(|m| (m - last).abs()).fold(0.0, f64::max);
    assert!(spread / last < 1e-3, "relative spread {}", spread / last);
    assert!(last >= trace.optimal_phase_variance);
}

#[test]
fn drift_is_reproducible_and_seeded() {
    let spec = DriftSpec { trials: 200, distribution: DriftDistribution::Uniform, ..DriftSpec::default() };
    let cfg = drift_cfg(spec);
    let a = run_drift(&cfg).unwrap();
    let b = run_drift(&cfg).unwrap();
    assert_eq!(a, b);
    let mut other = cfg.clone();
    other.seed = 6;
    assert_ne!(a, run_drift(&other).unwrap());
    for t in &a[0].trials {
        let f = spec.uniform_fraction;
        assert!(t.phi >= a[0].phi_opt * (1.0 - f) && t.phi <= a[0].phi_opt * (1.0 + f));
    }
}

#[test]
fn certain_heralds_keep_every_attempt() {
    let mut cfg = ScenarioConfig::from_toml("inputs = [{ kind = \"coherent\", amplitude = 1.0 }]\ndetection = [{ kind = \"intensity\", mode = 1 }]\nmetrics = { phase_variance = false }\n").unwrap();
    cfg.counts = Some(CountsSpec { trials: 500, transmissivity: None, m: vec![], mode: None });
    cfg.validate().unwrap();
    let rows = run_counts(&cfg).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].kept, 500);
    assert_eq!(rows[0].flag, CountsFlag::Ok);
    assert!((rows[0].sample_mean.unwrap() - 1.0).abs() < 0.2);
}

#[test]
fn three_photon_subtraction_is_rare() {
    let text = "seed = 3\ninputs = [{ kind = \"thermal\", nbar = 4.0 }]\nmodifications = [{ op = \"subtract\", mode = 1, m = 3, transmissivity = 0.9 }]\ndetection = [{ kind = \"intensity\", mode = 1 }]\nmetrics = { phase_variance = false }\nn_max = 80\n";
    let mut cfg = ScenarioConfig::from_toml(text).unwrap();
    cfg.counts = Some(CountsSpec { trials: 20000, transmissivity: None, m: vec![], mode: None });
    cfg.validate().unwrap();
    let row = &run_counts(&cfg).unwrap()[0];
    let ratio = row.trials as f64 / row.kept as f64;
    assert!((30.0..=120.0).contains(&ratio), "ratio {ratio}");
    let p = mzsim_core::reference::spsts_prob(4.0, 3, 0.9).unwrap();
    assert!((row.p_success - p).abs() < 1e-9);
    assert!(((row.kept as f64) - row.expected_kept).abs() <= 3.0 * row.kept_sigma);
}

#[test]
fn counts_grid_is_m_major() {
    let mut cfg = ScenarioConfig::from_path(&std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/pacs_counts.toml")).unwrap();
    let spec = cfg.counts.as_mut().unwrap();
    spec.transmissivity = Some(mzsim::Grid { start: 0.2, stop: 0.8, step: 0.3 });
    spec.trials = 400;
    let rows = run_counts(&cfg).unwrap();
    let keys: Vec<(usize, f64)> = rows.iter().map(|r| (r.m.unwrap(), r.transmissivity.unwrap())).collect();
    assert_eq!(keys.len(), 9);
    assert_eq!(keys[0], (1, 0.2));
    assert_eq!(keys[1].0, 1);
    assert_eq!(keys[3].0, 2);
    for r in &rows {
        assert!(r.kept <= r.trials);
    }
}
