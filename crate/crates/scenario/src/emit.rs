//! CSV and JSON emission. Numbers are written with 17 significant digits so that
//! every value round-trips; nothing time-dependent is recorded.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;

use crate::error::{ScenarioError, ScenarioResult};
use crate::report::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn out_err(e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Output(e.to_string())
}

type Table = (Vec<String>, Vec<Vec<String>>);

pub fn points_table(report: &RunReport) -> Table {
    let mut header: Vec<String> = [
        "index",
        "parameter",
        "value",
        "phi",
        "engine",
        "herald_probability",
        "mean_photons_in",
        "mean_photons_out",
        "snl",
        "hl",
        "qfi",
        "qcrb",
        "cfi",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for d in &report.config.detection {
        let n = d.name();
        for field in ["mean", "variance", "phase_variance", "optimal_phi", "optimal_phase_variance", "snr"] {
            header.push(format!("{n}_{field}"));
        }
    }
    header.push("warnings".into());
    let rows = report
        .points
        .iter()
        .map(|p| {
            let mut r = vec![
                p.index.to_string(),
                p.parameter.clone().unwrap_or_default(),
                opt(p.value),
                opt(p.phi),
                p.engine.clone(),
                opt(p.herald_probability),
                opt(p.mean_photons_in),
                opt(p.mean_photons_out),
                opt(p.snl),
                opt(p.hl),
                opt(p.qfi),
                opt(p.qcrb),
                opt(p.cfi),
            ];
            for (i, _) in report.config.detection.iter().enumerate() {
                match p.schemes.get(i) {
                    Some(s) => {
                        r.extend([num(s.mean), num(s.variance), opt(s.phase_variance), opt(s.optimal_phi), opt(s.optimal_phase_variance), opt(s.snr)])
                    }
                    None => r.extend(std::iter::repeat(String::new()).take(6)),
                }
            }
            r.push(p.warnings.join("; "));
            r
        })
        .collect();
    (header, rows)
}

pub fn distributions_table(report: &RunReport) -> Table {
    let header = ["index", "mode", "n", "probability", "tail"].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for p in &report.points {
        for d in &p.distributions {
            for (n, prob) in d.probs.iter().enumerate() {
                rows.push(vec![p.index.to_string(), d.mode.to_string(), n.to_string(), num(*prob), num(d.tail)]);
            }
        }
    }
    (header, rows)
}

pub fn drift_table(report: &RunReport) -> Table {
    let header =
        ["scheme", "distribution", "phi_opt", "spread", "k", "phi", "phase_variance", "running_mean"].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for t in &report.drift {
        let dist = serde_json::to_value(t.distribution).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        for trial in &t.trials {
            rows.push(vec![
                t.scheme.clone(),
                dist.clone(),
                num(t.phi_opt),
                num(t.spread),
                trial.k.to_string(),
                num(trial.phi),
                opt(trial.phase_variance),
                opt(trial.running_mean),
            ]);
        }
    }
    (header, rows)
}

pub fn counts_table(report: &RunReport) -> Table {
    let header = [
        "index",
        "m",
        "transmissivity",
        "trials",
        "p_success",
        "kept",
        "expected_kept",
        "kept_sigma",
        "sample_mean",
        "sample_snr",
        "model_mean",
        "model_snr",
        "flag",
        "warnings",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows = report
        .counts
        .iter()
        .map(|c| {
            let flag = serde_json::to_value(c.flag).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
            vec![
                c.index.to_string(),
                c.m.map(|m| m.to_string()).unwrap_or_default(),
                opt(c.transmissivity),
                c.trials.to_string(),
                num(c.p_success),
                c.kept.to_string(),
                num(c.expected_kept),
                num(c.kept_sigma),
                opt(c.sample_mean),
                opt(c.sample_snr),
                opt(c.model_mean),
                opt(c.model_snr),
                flag,
                c.warnings.join("; "),
            ]
        })
        .collect();
    (header, rows)
}

pub fn write_table<W: Write>(w: W, table: &Table) -> ScenarioResult<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(&table.0).map_err(out_err)?;
    for r in &table.1 {
        csv.write_record(r).map_err(out_err)?;
    }
    csv.flush().map_err(|e| ScenarioError::Output(e.to_string()))
}

pub fn to_json(report: &RunReport) -> ScenarioResult<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(out_err)?;
    s.push('\n');
    Ok(s)
}

/// Tables that carry data for this report, with their file names.
pub fn tables(report: &RunReport) -> Vec<(&'static str, Table)> {
    let mut out = Vec::new();
    if !report.points.is_empty() {
        out.push(("points.csv", points_table(report)));
        let d = distributions_table(report);
        if !d.1.is_empty() {
            out.push(("distributions.csv", d));
        }
    }
    if !report.drift.is_empty() {
        out.push(("drift.csv", drift_table(report)));
    }
    if !report.counts.is_empty() {
        out.push(("counts.csv", counts_table(report)));
    }
    out
}

/// Writes the report into `dir`; returns the files written.
pub fn write_dir(report: &RunReport, dir: &Path, format: Format) -> ScenarioResult<Vec<std::path::PathBuf>> {
    let io = |path: &Path| {
        let p = path.display().to_string();
        move |source| ScenarioError::Io { path: p, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    if matches!(format, Format::Csv | Format::Both) {
        for (name, table) in tables(report) {
            let path = dir.join(name);
            let f = std::fs::File::create(&path).map_err(io(&path))?;
            write_table(std::io::BufWriter::new(f), &table)?;
            written.push(path);
        }
    }
    if matches!(format, Format::Json | Format::Both) {
        let path = dir.join("report.json");
        std::fs::write(&path, to_json(report)?).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}

/// Writes to stdout: the JSON report, or the first CSV table for `Format::Csv`.
pub fn write_stdout(report: &RunReport, format: Format) -> ScenarioResult<()> {
    let stdout = std::io::stdout();
    match format {
        Format::Csv => match tables(report).into_iter().next() {
            Some((_, t)) => write_table(stdout.lock(), &t),
            None => Ok(()),
        },
        Format::Json | Format::Both => {
            let mut lock = stdout.lock();
            lock.write_all(to_json(report)?.as_bytes()).map_err(out_err)
        }
    }
}
