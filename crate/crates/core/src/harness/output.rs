//! CSV and plot-data emission.
//!
//! Trial tables serialize with a header row matching the `TrialRecord`
//! field names; floats print in Rust's shortest round-trip form with a `.`
//! decimal point, so `parse_csv(csv_string(t)) == t` and repeated runs of a
//! deterministic config produce byte-identical files. Plot-data files are
//! plain two-column whitespace-separated series, one file per series.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::config::{DecayAxis, ExperimentConfig, ExperimentKind};
use super::experiments::{ExperimentOutcome, TrialRecord};

/// Header row of every trial-record CSV, in `TrialRecord` field order.
pub const CSV_HEADER: &str =
    "experiment,axis,trial,seed,pee_total,pee_avg,max_component_error,emd,runtime_ms,algorithm";

/// Serializes trial records to CSV text. Errors on an empty table.
pub fn csv_string(records: &[TrialRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.experiment,
            r.axis,
            r.trial,
            r.seed,
            r.pee_total,
            r.pee_avg,
            r.max_component_error,
            r.emd,
            r.runtime_ms,
            r.algorithm
        )
        .expect("formatting into a string cannot fail");
    }
    Ok(out)
}

/// Writes trial records as a CSV file.
pub fn emit_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    fs::write(path, csv_string(records)?)?;
    Ok(())
}

/// Parses CSV produced by `csv_string`; the exact inverse on every table
/// this module emits.
pub fn parse_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::EmptyTable)?;
    if header != CSV_HEADER {
        return Err(Error::Config(format!("unexpected CSV header '{header}'")));
    }
    let mut records = Vec::new();
    for (offset, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let lineno = offset + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(Error::Config(format!(
                "line {lineno}: expected 10 fields, got {}",
                fields.len()
            )));
        }
        records.push(TrialRecord {
            experiment: fields[0].to_string(),
            axis: num_field(fields[1], lineno, "axis")?,
            trial: int_field(fields[2], lineno, "trial")?,
            seed: int_field(fields[3], lineno, "seed")?,
            pee_total: num_field(fields[4], lineno, "pee_total")?,
            pee_avg: num_field(fields[5], lineno, "pee_avg")?,
            max_component_error: num_field(fields[6], lineno, "max_component_error")?,
            emd: num_field(fields[7], lineno, "emd")?,
            runtime_ms: num_field(fields[8], lineno, "runtime_ms")?,
            algorithm: fields[9].to_string(),
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyTable);
    }
    Ok(records)
}

fn num_field(raw: &str, lineno: usize, name: &str) -> Result<f64> {
    raw.parse()
        .map_err(|_| Error::Config(format!("line {lineno}: bad {name} value '{raw}'")))
}

fn int_field<T: std::str::FromStr>(raw: &str, lineno: usize, name: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::Config(format!("line {lineno}: bad {name} value '{raw}'")))
}

/// Writes one two-column whitespace-separated (x, y) series. Errors on an
/// empty series.
pub fn emit_plotdata(series: &[(f64, f64)], path: &Path) -> Result<()> {
    if series.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut out = String::new();
    for &(x, y) in series {
        writeln!(out, "{x} {y}").expect("formatting into a string cannot fail");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Small numeric table with named columns; each experiment aggregates into
/// one of these.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SummaryTable {
    pub fn new(headers: &[&str]) -> Self {
        Self::from_headers(headers.iter().map(|h| h.to_string()).collect())
    }

    pub fn from_headers(headers: Vec<String>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
        }
    }

    /// Appends a row, which must match the header width.
    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.headers.len(), "summary row width");
        self.rows.push(row);
    }

    /// Values of the named column.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("no summary column '{name}'")))?;
        Ok(self.rows.iter().map(|row| row[idx]).collect())
    }

    /// (x, y) pairs of two named columns.
    pub fn series(&self, x: &str, y: &str) -> Result<Vec<(f64, f64)>> {
        Ok(self.column(x)?.into_iter().zip(self.column(y)?).collect())
    }

    /// Serializes to CSV. Errors on an empty table.
    pub fn csv_string(&self) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::EmptyTable);
        }
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn emit_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.csv_string()?)?;
        Ok(())
    }
}

/// Writes everything one finished experiment produces into a directory:
/// trials.csv (when any trials were recorded), summary.csv, and the plot
/// series for the experiment's headline figure. Returns the created paths.
pub fn write_experiment_outputs(
    cfg: &ExperimentConfig,
    outcome: &ExperimentOutcome,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if !outcome.records.is_empty() {
        let path = dir.join("trials.csv");
        emit_csv(&outcome.records, &path)?;
        written.push(path);
    }
    let summary_path = dir.join("summary.csv");
    outcome.summary.emit_csv(&summary_path)?;
    written.push(summary_path);
    for (name, series) in plot_series(cfg, outcome)? {
        if series.is_empty() {
            continue;
        }
        let path = dir.join(name);
        emit_plotdata(&series, &path)?;
        written.push(path);
    }
    Ok(written)
}

/// Named plot series for an experiment's summary: the separation sweep
/// emits the raw and the correlation-mass-normalized resolution curves, the
/// decay sweep one curve against its swept variable (skipping unresolved
/// points), and the compression and SNR sweeps one curve per algorithm.
fn plot_series(
    cfg: &ExperimentConfig,
    outcome: &ExperimentOutcome,
) -> Result<Vec<(String, Vec<(f64, f64)>)>> {
    let summary = &outcome.summary;
    let mut series = Vec::new();
    match cfg.experiment {
        ExperimentKind::SeparationSweep => {
            series.push(("separation_raw.dat".to_string(), summary.series("zeta", "sigma")?));
            series.push((
                "separation_normalized.dat".to_string(),
                summary.series("lambda_zeta_over_lambda_inf", "lambda_sigma_over_lambda_zero")?,
            ));
        }
        ExperimentKind::DecaySweep => {
            let x = match cfg.decay_axis {
                DecayAxis::SweepRate => "fitted_a",
                DecayAxis::DynamicRange | DecayAxis::Threshold => "axis",
            };
            let resolved: Vec<(f64, f64)> = summary
                .series(x, "zeta_min_over_delta")?
                .into_iter()
                .filter(|&(_, y)| y >= 0.0)
                .collect();
            series.push((format!("decay_{}.dat", cfg.decay_axis.name()), resolved));
        }
        ExperimentKind::CompressionSweep | ExperimentKind::SnrSweep => {
            for header in &summary.headers[1..] {
                let alg = header.trim_start_matches("mean_pee_avg_");
                series.push((
                    format!("{}_{alg}.dat", cfg.experiment.name()),
                    summary.series("axis", header)?,
                ));
            }
        }
        ExperimentKind::Single => {}
    }
    Ok(series)
}
