//! Benchmark harness and its reports.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{prove, timed, ConfigPatch, RandomSearchReport, RunConfig, Status, StepStats};
use crate::problem::Problem;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    pub n: usize,
    pub deg: u32,
    pub nn: String,
    pub m0: usize,
    pub status: Status,
    pub proof_steps: Option<usize>,
    pub rollout_steps: usize,
    pub total_steps: usize,
    pub wall_seconds: f64,
    pub certificate: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSummary {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub stats: Option<StepStats>,
}

impl From<&RandomSearchReport> for RandomSummary {
    fn from(r: &RandomSearchReport) -> Self {
        Self { name: r.problem.clone(), trials: r.trials.len(), failures: r.failures, stats: r.stats }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub random: Vec<RandomSummary>,
}

fn aligned(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    out += &line(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        if !self.rows.is_empty() {
            let rows: Vec<Vec<String>> = self
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        r.n.to_string(),
                        r.deg.to_string(),
                        r.nn.clone(),
                        r.m0.to_string(),
                        match r.status {
                            Status::Proved => "proved".into(),
                            Status::Unknown => "unknown".into(),
                        },
                        r.proof_steps.map_or("-".into(), |s| s.to_string()),
                        r.rollout_steps.to_string(),
                        r.total_steps.to_string(),
                        format!("{:.2}", r.wall_seconds),
                        r.certificate.clone().unwrap_or_else(|| "-".into()),
                    ]
                })
                .collect();
            out += &aligned(
                &["problem", "n", "deg", "NN", "|M0|", "status", "S", "rollout", "env steps", "time (s)", "certificate"],
                &rows,
            );
        }
        if !self.random.is_empty() {
            if !out.is_empty() {
                out.push('\n');
            }
            let rows: Vec<Vec<String>> = self
                .random
                .iter()
                .map(|r| {
                    let (max, min, avg) = match r.stats {
                        Some(s) => (s.max.to_string(), s.min.to_string(), format!("{:.1}", s.avg)),
                        None => ("-".into(), "-".into(), "-".into()),
                    };
                    vec![r.name.clone(), r.trials.to_string(), r.failures.to_string(), max, min, avg]
                })
                .collect();
            out += &aligned(&["problem", "trials", "failures", "S_max", "S_min", "S_avg"], &rows);
        }
        out
    }
}

/// Proves each problem with its own overrides layered under `cli`, writing
/// certificates into `cert_dir` when given. Failures are recorded and the
/// run continues.
pub fn bench(problems: &[Problem], base: &RunConfig, cli: &ConfigPatch, cert_dir: Option<&Path>) -> BenchReport {
    let mut report = BenchReport::default();
    for p in problems {
        let mut row = BenchRow {
            name: p.name.clone(),
            n: p.nvars(),
            deg: p.target.degree(),
            nn: String::new(),
            m0: 0,
            status: Status::Unknown,
            proof_steps: None,
            rollout_steps: 0,
            total_steps: 0,
            wall_seconds: 0.0,
            certificate: None,
            error: None,
        };
        let config = match base.resolve(&p.overrides, cli) {
            Ok(c) => c,
            Err(e) => {
                row.error = Some(e.to_string());
                report.rows.push(row);
                continue;
            }
        };
        row.nn = format!("{}({})", config.dqn.hidden, config.dqn.layers);
        let (result, secs) = timed(|| prove(p, &config));
        row.wall_seconds = secs;
        match result {
            Ok(out) => {
                row.m0 = out.initial_memory;
                row.status = out.status;
                row.proof_steps = out.proof_steps;
                row.rollout_steps = out.rollout_steps;
                row.total_steps = out.total_steps;
                if let (Some(cert), Some(dir)) = (&out.certificate, cert_dir) {
                    let path = dir.join(format!("{}.cert.json", p.name));
                    match std::fs::write(&path, cert.to_json()) {
                        Ok(()) => row.certificate = Some(path.display().to_string()),
                        Err(e) => row.error = Some(format!("writing {}: {e}", path.display())),
                    }
                }
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        report.rows.push(row);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_columns_line_up() {
        let t = aligned(&["a", "long"], &[vec!["xyz".into(), "1".into()], vec!["q".into(), "22".into()]]);
        assert_eq!(t, "a    long\n---  ----\nxyz  1\nq    22\n");
    }

    #[test]
    fn empty_suite_gives_empty_report() {
        let r = bench(&[], &RunConfig::default(), &ConfigPatch::default(), None);
        assert!(r.rows.is_empty());
        assert_eq!(r.render_table(), "");
    }
}
