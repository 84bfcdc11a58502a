//! CSV and JSON artifacts.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so every
//! value parses back to the identical `f64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use synth_core::{ExcitationMatrix, PatternCut, RunResult};

pub const PATTERN_HEADER: [&str; 2] = ["theta_deg", "magnitude_db"];
pub const CONVERGENCE_HEADER: [&str; 3] = ["iteration", "best_objective_db", "fitness_delta_db"];
pub const SUMMARY_HEADER: [&str; 4] = ["seed", "sll_db", "main_lobe_low_deg", "main_lobe_high_deg"];

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))
}

pub fn write_pattern_csv(path: &Path, cut: &PatternCut) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(PATTERN_HEADER)?;
    for (theta, db) in cut.theta_deg().iter().zip(cut.magnitude_db()) {
        w.write_record([theta.to_string(), db.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per iteration, numbered from 1.
pub fn write_convergence_csv(path: &Path, run: &RunResult) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(CONVERGENCE_HEADER)?;
    for (i, (best, delta)) in run.best_history.iter().zip(&run.fitness_deltas).enumerate() {
        w.write_record([(i + 1).to_string(), best.to_string(), delta.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Headerless, `M` rows of `N` amplitudes.
pub fn write_excitation_csv(path: &Path, excitation: &ExcitationMatrix) -> Result<()> {
    let mut w = writer(path)?;
    for row in excitation.rows() {
        w.write_record(row.iter().map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_excitation_csv(path: &Path) -> Result<ExcitationMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: malformed row {}", path.display(), i + 1))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .with_context(|| format!("{}: row {}: `{field}` is not a number", path.display(), i + 1))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("{}: no amplitudes", path.display());
    }
    ExcitationMatrix::from_rows(&rows).with_context(|| format!("{}: invalid excitation", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub seed: u64,
    pub sll_db: f64,
    pub main_lobe_low_deg: f64,
    pub main_lobe_high_deg: f64,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

/// Per-seed rows followed by a `median` row.
pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.seed.to_string(),
            r.sll_db.to_string(),
            r.main_lobe_low_deg.to_string(),
            r.main_lobe_high_deg.to_string(),
        ])?;
    }
    let column = |f: fn(&SummaryRow) -> f64| {
        median(&rows.iter().map(f).collect::<Vec<_>>()).map_or_else(String::new, |v| v.to_string())
    };
    w.write_record([
        "median".to_string(),
        column(|r| r.sll_db),
        column(|r| r.main_lobe_low_deg),
        column(|r| r.main_lobe_high_deg),
    ])?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn excitation_csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        let e = ExcitationMatrix::new(2, 3, vec![0.1, 1.0 / 3.0, 1e-300, 0.0, 0.7, 2f64.sqrt()]).unwrap();
        write_excitation_csv(&path, &e).unwrap();
        assert_eq!(read_excitation_csv(&path).unwrap(), e);
    }

    #[test]
    fn ragged_or_bad_excitation_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        std::fs::write(&path, "1,2\n3\n").unwrap();
        assert!(read_excitation_csv(&path).is_err());
        std::fs::write(&path, "1,x\n").unwrap();
        assert!(read_excitation_csv(&path).is_err());
        std::fs::write(&path, "1,-1\n").unwrap();
        assert!(read_excitation_csv(&path).is_err());
        std::fs::write(&path, "").unwrap();
        assert!(read_excitation_csv(&path).is_err());
    }
}
