//! Dataset files, synthetic data, splitting, benchmarking and reports.

mod bench;
mod dataset;
mod extract;
mod report;
mod scores;
mod split;
mod synth;

pub use bench::{evaluate_model, run_benchmark, BenchReport, BenchRow, RowOutcome};
pub use dataset::{load_dataset, save_dataset, CASES_FILE, MANIFEST_FILE};
pub use extract::{extract_dataset, LABELS_FILE};
pub use report::{emit_report, format_row, parse_csv_report, CsvRow, ReportFormat, TABLE_HEADER};
pub use scores::{parse_label_list, read_scores, write_scores, ScoreRow};
pub use split::{stratified_split, Split};
pub use synth::{generate_synthetic, label_centre, SynthConfig};
