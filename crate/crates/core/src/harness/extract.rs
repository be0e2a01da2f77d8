use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::report::csv_err;
use super::scores::parse_label_list;
use crate::bag::{Case, Manifest, MimlDataset};
use crate::error::{MimlError, Result};
use crate::exec::Execution;
use crate::features::{extract_case_features_with, read_ppm, StainMatrix, LBP_BINS};

pub const LABELS_FILE: &str = "labels.csv";

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| MimlError::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| MimlError::io(dir, err)))
        .collect::<Result<_>>()?;
    out.sort();
    Ok(out)
}

/// `case_id,expert_id,labels` rows, labels as `;`-joined indices.
fn read_labels(path: &Path) -> Result<HashMap<String, (String, String)>> {
    let mut rd = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut out = HashMap::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 3 {
            return Err(MimlError::Parse {
                path: path.into(),
                line: i + 2,
                message: "expected case_id,expert_id,labels".into(),
            });
        }
        out.insert(rec[0].to_string(), (rec[1].to_string(), rec[2].to_string()));
    }
    Ok(out)
}

/// Builds a dataset from a directory holding one sub-directory of PPM ROI
/// images per case. Labels come from an optional `labels.csv` at the root;
/// cases missing from it get an empty label set.
pub fn extract_dataset(images: &Path, stains: &StainMatrix, exec: Execution) -> Result<MimlDataset> {
    let labels_path = images.join(LABELS_FILE);
    let labels = if labels_path.is_file() {
        read_labels(&labels_path)?
    } else {
        HashMap::new()
    };
    let case_dirs: Vec<PathBuf> = sorted_entries(images)?.into_iter().filter(|p| p.is_dir()).collect();
    let cases = exec
        .map_slice(&case_dirs, |dir| -> Result<Case> {
            let case_id = dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let rois = sorted_entries(dir)?
                .into_iter()
                .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm")))
                .map(|p| read_ppm(&p))
                .collect::<Result<Vec<_>>>()?;
            let bag = extract_case_features_with(&rois, stains)
                .map_err(|e| MimlError::invalid(format!("case {case_id}: {e}")))?;
            let (expert_id, label_text) = labels.get(&case_id).cloned().unwrap_or_default();
            let labels = parse_label_list(&label_text).map_err(|message| MimlError::Parse {
                path: labels_path.clone(),
                line: 0,
                message: format!("case {case_id}: {message}"),
            })?;
            Ok(Case {
                case_id,
                expert_id,
                labels,
                bag,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let d = MimlDataset::new(Manifest::with_default_labels(LBP_BINS), cases);
    d.ensure_valid()?;
    Ok(d)
}
