//! The four workflows and where their outputs go.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use oscavg_core::oracle::{verify_oscillator, OracleFit, Verdict, VerifyOutcome, VerifySettings};
use oscavg_core::{analyze_case, average_system, Rational};
use serde::Serialize;

use crate::config::{Grid, SystemFile};
use crate::error::{CliError, Result};
use crate::report::{CaseReport, VerificationReport};
use crate::sweep::{self, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Without a directory the primary output goes to stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Output {
    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    fn create(&self, dir: &Path, name: &str) -> Result<BufWriter<File>> {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        let path = dir.join(name);
        Ok(BufWriter::new(File::create(&path).map_err(CliError::io(&path))?))
    }

    fn write_text(&self, dir: &Path, name: &str, text: &str) -> Result<()> {
        let path = dir.join(name);
        let mut w = self.create(dir, name)?;
        w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(CliError::io(path))
    }

    fn emit_report(&self, report: &CaseReport, outcome: Option<&VerifyOutcome>) -> Result<()> {
        let Some(dir) = &self.dir else {
            print!("{}", report.to_json());
            return Ok(());
        };
        if self.wants(Format::Json) {
            self.write_text(dir, "report.json", &report.to_json())?;
        }
        if let (true, Some(outcome)) = (self.wants(Format::Csv), outcome) {
            let path = dir.join("envelope.csv");
            let mut w = self.create(dir, "envelope.csv")?;
            outcome.envelope.write_csv(&mut w).and_then(|_| w.flush()).map_err(CliError::io(path))?;
            let sidecar = FitSidecar::new(outcome);
            let mut text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
            text.push('\n');
            self.write_text(dir, "envelope.json", &text)?;
        }
        Ok(())
    }
}

/// Fit metadata written next to `envelope.csv`.
#[derive(Debug, Serialize)]
struct FitSidecar {
    model: Option<String>,
    estimate: Option<f64>,
    stderr: Option<f64>,
    window: (f64, f64),
    samples: Option<usize>,
    predicted: f64,
    tolerance: f64,
    verdict: Verdict,
}

impl FitSidecar {
    fn new(outcome: &VerifyOutcome) -> Self {
        let fit: Option<&OracleFit> = outcome.fit.as_ref();
        FitSidecar {
            model: fit.map(|f| f.model.label().to_string()),
            estimate: fit.map(|f| f.estimate),
            stderr: fit.map(|f| f.std_error),
            window: outcome.window,
            samples: fit.map(|f| f.samples),
            predicted: outcome.target.value,
            tolerance: outcome.target.tolerance,
            verdict: outcome.verdict,
        }
    }
}

pub fn analyze(system: &Path, output: &Output) -> Result<CaseReport> {
    let file = SystemFile::load(system)?;
    let spec = file.to_spec()?;
    let averaged = average_system(&spec)?;
    let report = CaseReport::for_system(&file, &spec, &averaged)?;
    output.emit_report(&report, None)?;
    Ok(report)
}

/// Runs the oscillator pipeline and, with `verify`, the oracle comparison.
/// A rejected comparison is reported after all outputs are written.
pub fn oscillator(lambda: &Rational, alpha: &Rational, verify: Option<&VerifySettings>, output: &Output) -> Result<CaseReport> {
    let case = analyze_case(lambda, alpha)?;
    let mut report = CaseReport::for_oscillator(&case);
    let outcome = match verify {
        Some(settings) => {
            let outcome = verify_oscillator(&case, settings)?;
            report.verification = Some(VerificationReport::new(settings, &outcome));
            Some(outcome)
        }
        None => None,
    };
    output.emit_report(&report, outcome.as_ref())?;
    if let Some(v) = &report.verification {
        if v.verdict == Verdict::Rejected {
            let detail = v
                .comparison
                .as_ref()
                .map(|c| format!("estimate {} vs predicted {} (allowed deviation {})", c.estimate, c.predicted, c.allowed))
                .unwrap_or_default();
            return Err(CliError::Rejected(detail));
        }
    }
    Ok(report)
}

pub fn sweep(grid: &Grid, output: &Output) -> Result<Vec<SweepRow>> {
    let rows = sweep::run_sweep(grid);
    let mut csv_bytes = Vec::new();
    sweep::write_csv(&rows, &mut csv_bytes).map_err(|e| CliError::Usage(format!("writing sweep CSV: {e}")))?;
    let mut json = serde_json::to_string_pretty(&rows).expect("rows serialize");
    json.push('\n');
    match &output.dir {
        None if output.wants(Format::Csv) => print!("{}", String::from_utf8(csv_bytes).expect("utf-8 CSV")),
        None => print!("{json}"),
        Some(dir) => {
            if output.wants(Format::Csv) {
                output.write_text(dir, "sweep.csv", &String::from_utf8(csv_bytes).expect("utf-8 CSV"))?;
            }
            if output.wants(Format::Json) {
                output.write_text(dir, "sweep.json", &json)?;
            }
        }
    }
    Ok(rows)
}
