use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::bag::{Case, Manifest, MimlDataset};
use crate::error::{MimlError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CASES_FILE: &str = "cases.jsonl";

/// Writes `manifest.json` and `cases.jsonl` (one case per line) under `dir`.
pub fn save_dataset(d: &MimlDataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| MimlError::io(dir, e))?;
    let mpath = dir.join(MANIFEST_FILE);
    let mut manifest = serde_json::to_string_pretty(&d.manifest)?;
    manifest.push('\n');
    fs::write(&mpath, manifest).map_err(|e| MimlError::io(&mpath, e))?;

    let cpath = dir.join(CASES_FILE);
    let mut out = Vec::new();
    for c in &d.cases {
        serde_json::to_writer(&mut out, c)?;
        out.push(b'\n');
    }
    let mut f = fs::File::create(&cpath).map_err(|e| MimlError::io(&cpath, e))?;
    f.write_all(&out).map_err(|e| MimlError::io(&cpath, e))
}

/// Reads a dataset directory and validates it.
pub fn load_dataset(dir: &Path) -> Result<MimlDataset> {
    let mpath = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&mpath).map_err(|e| MimlError::io(&mpath, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| MimlError::Parse {
        path: mpath.clone(),
        line: e.line(),
        message: e.to_string(),
    })?;
    if manifest.format_version != Manifest::FORMAT_VERSION {
        return Err(MimlError::Parse {
            path: mpath,
            line: 1,
            message: format!("unsupported format_version {}", manifest.format_version),
        });
    }

    let cpath = dir.join(CASES_FILE);
    let file = fs::File::open(&cpath).map_err(|e| MimlError::io(&cpath, e))?;
    let mut cases = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| MimlError::io(&cpath, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let case: Case = serde_json::from_str(&line).map_err(|e| MimlError::Parse {
            path: cpath.clone(),
            line: i + 1,
            message: e.to_string(),
        })?;
        cases.push(case);
    }
    let d = MimlDataset::new(manifest, cases);
    d.ensure_valid()?;
    Ok(d)
}
