use std::str::FromStr;

use super::bench::{BenchReport, RowOutcome};
use crate::error::{MimlError, Result};
use crate::learners::Algorithm;

pub const TABLE_HEADER: [&str; 6] = ["Algorithms", "h.l.", "o.e.", "r.l.", "co.", "a.p."];
const CSV_HEADER: [&str; 9] = [
    "algorithm",
    "status",
    "hamming_loss",
    "one_error",
    "ranking_loss",
    "coverage",
    "average_precision",
    "seed",
    "seconds",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = MimlError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(MimlError::invalid(format!("unknown report format `{s}`"))),
        }
    }
}

/// One table row: name and the five metrics at 3 decimals, space separated.
pub fn format_row(name: &str, values: &[f64; 5]) -> String {
    let mut s = name.to_string();
    for v in values {
        s.push_str(&format!(" {v:.3}"));
    }
    s
}

fn text_report(r: &BenchReport) -> String {
    let mut cells: Vec<Vec<String>> = vec![TABLE_HEADER.iter().map(|s| s.to_string()).collect()];
    let mut failures = Vec::new();
    for row in &r.rows {
        match &row.outcome {
            RowOutcome::Ok(e) => {
                let mut line = vec![row.algorithm.display_name().to_string()];
                line.extend(e.as_row().iter().map(|v| format!("{v:.3}")));
                cells.push(line);
            }
            RowOutcome::Failed(msg) => failures.push((row.algorithm.display_name(), msg)),
        }
    }
    let widths: Vec<usize> = (0..TABLE_HEADER.len())
        .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for line in &cells {
        let padded: Vec<String> = line.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(padded.join(" ").trim_end());
        out.push('\n');
    }
    for (name, msg) in failures {
        out.push_str(&format!("{name} failed: {msg}\n"));
    }
    out
}

fn csv_report(r: &BenchReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in &r.rows {
        let mut rec = vec![row.algorithm.key().to_string()];
        match &row.outcome {
            RowOutcome::Ok(e) => {
                rec.push("ok".into());
                rec.extend(e.as_row().iter().map(|v| v.to_string()));
            }
            RowOutcome::Failed(msg) => {
                rec.push(format!("failed: {msg}"));
                rec.extend(std::iter::repeat_n(String::new(), 5));
            }
        }
        rec.push(row.seed.to_string());
        rec.push(row.seconds.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| MimlError::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| MimlError::invalid(e.to_string()))
}

pub(crate) fn csv_err(e: csv::Error) -> MimlError {
    MimlError::invalid(format!("csv: {e}"))
}

/// Text is the aligned table at 3 decimals and carries no timings; CSV keeps
/// full precision plus seed and seconds.
pub fn emit_report(r: &BenchReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Text => Ok(text_report(r)),
        ReportFormat::Csv => csv_report(r),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub algorithm: Algorithm,
    /// `None` for a failed row.
    pub values: Option<[f64; 5]>,
    pub seed: u64,
    pub seconds: f64,
}

pub fn parse_csv_report(s: &str) -> Result<Vec<CsvRow>> {
    let mut rd = csv::Reader::from_reader(s.as_bytes());
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != CSV_HEADER.len() {
            return Err(MimlError::invalid("csv report row has the wrong number of fields"));
        }
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| MimlError::invalid(format!("bad number `{}`", &rec[i])))
        };
        let values = if &rec[1] == "ok" {
            Some([num(2)?, num(3)?, num(4)?, num(5)?, num(6)?])
        } else {
            None
        };
        rows.push(CsvRow {
            algorithm: Algorithm::parse(&rec[0])?,
            values,
            seed: rec[7].parse().map_err(|_| MimlError::invalid("bad seed"))?,
            seconds: num(8)?,
        });
    }
    Ok(rows)
}
