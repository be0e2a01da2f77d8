use std::path::Path;

use super::report::csv_err;
use crate::bag::LabelSet;
use crate::error::{MimlError, Result};
use crate::learners::Prediction;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub case_id: String,
    pub scores: Vec<f64>,
    pub decided: LabelSet,
}

/// Header `case_id, <label names>, decided`; decided indices are `;`-joined.
pub fn write_scores(path: &Path, label_names: &[String], case_ids: &[&str], preds: &[Prediction]) -> Result<()> {
    if case_ids.len() != preds.len() {
        return Err(MimlError::DimensionMismatch {
            expected: case_ids.len(),
            found: preds.len(),
        });
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec!["case_id".to_string()];
    header.extend(label_names.iter().cloned());
    header.push("decided".into());
    w.write_record(&header).map_err(csv_err)?;
    for (id, p) in case_ids.iter().zip(preds) {
        let mut rec = vec![id.to_string()];
        rec.extend(p.scores.iter().map(|s| s.to_string()));
        rec.push(p.decided.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| MimlError::io(path, e))
}

pub fn read_scores(path: &Path) -> Result<(Vec<String>, Vec<ScoreRow>)> {
    let mut rd = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.len() < 3 || &header[0] != "case_id" || &header[header.len() - 1] != "decided" {
        return Err(MimlError::Parse {
            path: path.into(),
            line: 1,
            message: "expected header case_id,<labels...>,decided".into(),
        });
    }
    let n_labels = header.len() - 2;
    let names = header.iter().skip(1).take(n_labels).map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let line = i + 2;
        let parse_err = |message: String| MimlError::Parse {
            path: path.into(),
            line,
            message,
        };
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        let scores = (1..=n_labels)
            .map(|k| {
                rec[k]
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(format!("bad score `{}`", &rec[k])))
            })
            .collect::<Result<Vec<f64>>>()?;
        let decided = parse_label_list(&rec[n_labels + 1]).map_err(parse_err)?;
        rows.push(ScoreRow {
            case_id: rec[0].to_string(),
            scores,
            decided,
        });
    }
    Ok((names, rows))
}

/// Parses `;`-joined label indices; the empty string is the empty set.
pub fn parse_label_list(s: &str) -> std::result::Result<LabelSet, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(LabelSet::empty());
    }
    s.split(';')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad label index `{t}`")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(LabelSet::new)
}
