//! Running checks and emitting reports.

use std::io::{self, Write};

use serde::Serialize;

use crate::checks::{self, Ctx};
use crate::scenario::{Provenance, ScenarioFile};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub check: String,
    pub sample_index: usize,
    pub point: Vec<f64>,
    /// `None` when the check raised an error or the residual is not finite.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub tolerance: f64,
    pub records: Vec<Record>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    /// Largest finite residual, `None` if no sample produced one.
    pub fn max_residual(&self) -> Option<f64> {
        self.records.iter().filter_map(|r| r.residual).reduce(f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub provenance: Provenance,
    pub seed: Option<u64>,
    pub samples: Vec<Vec<f64>>,
    pub checks: Vec<CheckReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs the registered checks (or the filtered subset, in file order) at
/// every sample. Errors become failed records.
pub fn run_checks(file: &ScenarioFile, filter: Option<&[String]>, seed: Option<u64>, count: Option<usize>) -> Report {
    let samples = file.sampling.points(seed, count);
    let ctx = Ctx::new(file, &samples);
    let mut out = Vec::new();
    for name in &file.checks {
        if filter.is_some_and(|f| !f.contains(name)) {
            continue;
        }
        let def = checks::find(name).expect("validated at load");
        let tolerance = def.tolerance_for(&file.options);
        let records = samples
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let (residual, error) = match def.run(&ctx, p) {
                    Ok(r) if r.is_finite() => (Some(r), None),
                    Ok(r) => (None, Some(format!("non-finite residual {r}"))),
                    Err(e) => (None, Some(e.to_string())),
                };
                let pass = residual.is_some_and(|r| r <= tolerance);
                Record { check: name.clone(), sample_index: i, point: p.clone(), residual, tolerance, pass, error }
            })
            .collect();
        out.push(CheckReport { name: name.clone(), tolerance, records });
    }
    Report {
        scenario: file.name.clone(),
        provenance: file.provenance.clone(),
        seed: seed.or(file.sampling.seed()),
        samples,
        checks: out,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Jsonl,
}

#[derive(Serialize)]
struct Header<'a> {
    scenario: &'a str,
    radical: &'a str,
    complement: &'a str,
    convention: &'a str,
    screen: &'a str,
    seed: Option<u64>,
    samples: usize,
    checks: Vec<&'a str>,
}

pub fn emit(report: &Report, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Jsonl => {
            let header = Header {
                scenario: &report.scenario,
                radical: &report.provenance.radical,
                complement: &report.provenance.complement,
                convention: &report.provenance.convention,
                screen: &report.provenance.screen,
                seed: report.seed,
                samples: report.samples.len(),
                checks: report.checks.iter().map(|c| c.name.as_str()).collect(),
            };
            serde_json::to_writer(&mut *out, &header)?;
            writeln!(out)?;
            for c in &report.checks {
                for r in &c.records {
                    serde_json::to_writer(&mut *out, r)?;
                    writeln!(out)?;
                }
            }
        }
        Format::Text => {
            writeln!(out, "scenario   {}", report.scenario)?;
            writeln!(out, "radical    {}", report.provenance.radical)?;
            writeln!(out, "complement {}", report.provenance.complement)?;
            writeln!(out, "convention {}", report.provenance.convention)?;
            writeln!(out, "screen     {}", report.provenance.screen)?;
            match report.seed {
                Some(s) => writeln!(out, "samples    {} (seed {s})", report.samples.len())?,
                None => writeln!(out, "samples    {}", report.samples.len())?,
            }
            writeln!(out)?;
            writeln!(out, "{:<20} {:>12} {:>10}  status", "check", "max resid", "tol")?;
            for c in &report.checks {
                let max = c.max_residual().map_or("-".to_string(), |r| format!("{r:.3e}"));
                let status = if c.passed() { "pass" } else { "FAIL" };
                writeln!(out, "{:<20} {:>12} {:>10.1e}  {status}", c.name, max, c.tolerance)?;
                for r in c.records.iter().filter(|r| r.error.is_some()) {
                    writeln!(out, "  sample {}: {}", r.sample_index, r.error.as_deref().unwrap_or(""))?;
                }
            }
            let failed = report.checks.iter().filter(|c| !c.passed()).count();
            writeln!(out)?;
            writeln!(out, "{} checks, {failed} failed", report.checks.len())?;
        }
    }
    Ok(())
}
