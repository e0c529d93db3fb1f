use std::io::Read;
use std::path::Path;

use serde::Serialize;
use tsuka_core::loan::{assess, Applicant, Assessment, FisConfig};

use super::{atomic_write, io_error, StoreError};

pub const APPLICANT_HEADER: [&str; 5] = ["id", "name", "income", "loan_amount", "collateral_value"];
pub const EXPORT_HEADER: [&str; 3] = ["id", "score", "decision"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowFailure {
    /// 1-based, not counting the header.
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BatchReport {
    pub rows_total: usize,
    pub rows_ok: usize,
    pub rows_failed: usize,
    pub failures: Vec<RowFailure>,
    pub assessments: Vec<Assessment>,
}

pub fn ingest_csv(path: &Path, cfg: &FisConfig) -> Result<BatchReport, StoreError> {
    let file = std::fs::File::open(path).map_err(io_error(path))?;
    ingest_reader(file, cfg)
}

/// Scores every row. Malformed rows become failures; only an unreadable
/// stream or a bad header fails the whole batch.
pub fn ingest_reader(reader: impl Read, cfg: &FisConfig) -> Result<BatchReport, StoreError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    let columns = column_positions(&header)?;

    let mut report = BatchReport::default();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        report.rows_total += 1;
        let outcome = record
            .map_err(|e| e.to_string())
            .and_then(|r| parse_row(&r, &columns))
            .and_then(|a| assess(&a, cfg).map_err(|e| e.to_string()));
        match outcome {
            Ok(assessment) => {
                report.rows_ok += 1;
                report.assessments.push(assessment);
            }
            Err(reason) => {
                report.rows_failed += 1;
                report.failures.push(RowFailure { row, reason });
            }
        }
    }
    Ok(report)
}

fn column_positions(header: &csv::StringRecord) -> Result<[usize; 5], StoreError> {
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if let Some(unknown) = names.iter().find(|n| !APPLICANT_HEADER.contains(n)) {
        return Err(StoreError::Header(format!("unknown column `{unknown}`")));
    }
    let mut positions = [0; 5];
    for (slot, want) in positions.iter_mut().zip(APPLICANT_HEADER) {
        let mut found = names.iter().enumerate().filter(|(_, n)| **n == want);
        *slot = match (found.next(), found.next()) {
            (Some((p, _)), None) => p,
            (None, _) => return Err(StoreError::Header(format!("missing column `{want}`"))),
            (Some(_), Some(_)) => return Err(StoreError::Header(format!("duplicate column `{want}`"))),
        };
    }
    Ok(positions)
}

fn parse_row(record: &csv::StringRecord, columns: &[usize; 5]) -> Result<Applicant, String> {
    if record.len() != APPLICANT_HEADER.len() {
        return Err(format!("expected {} fields, found {}", APPLICANT_HEADER.len(), record.len()));
    }
    let field = |k: usize| record.get(columns[k]).unwrap_or("").trim();
    let number = |k: usize| -> Result<f64, String> {
        let raw = field(k);
        raw.parse::<f64>().map_err(|_| format!("{}: `{raw}` is not a number", APPLICANT_HEADER[k]))
    };
    Ok(Applicant {
        id: field(0).to_owned(),
        name: field(1).to_owned(),
        income: number(2)?,
        loan_amount: number(3)?,
        collateral_value: number(4)?,
    })
}

/// The export as CSV text: `id,score,decision`, scores to 6 decimals.
pub fn export_to_string(report: &BatchReport) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(EXPORT_HEADER).expect("in-memory write");
    for a in &report.assessments {
        let score = format!("{:.6}", a.score);
        w.write_record([a.applicant_id.as_str(), score.as_str(), a.decision.as_str()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn export_csv(report: &BatchReport, path: &Path) -> Result<(), StoreError> {
    atomic_write(path, export_to_string(report).as_bytes(), &|| Ok(()))
}
