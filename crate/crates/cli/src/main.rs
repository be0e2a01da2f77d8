use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use miml::features::StainMatrix;
use miml::harness::{
    emit_report, extract_dataset, generate_synthetic, load_dataset, read_scores, run_benchmark, save_dataset,
    stratified_split, write_scores, ReportFormat, RowOutcome, SynthConfig,
};
use miml::learners::predict_many;
use miml::metrics::evaluate_all;
use miml::{train, Algorithm, AlgorithmParams, Execution, LabelSet, MimlError, TrainedModel};

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_TRAINING: u8 = 4;

#[derive(Parser)]
#[command(name = "miml", version, about = "Multi-instance multi-label learning toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset with known label clusters.
    GenSynth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        bags: usize,
        #[arg(long)]
        labels: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long, default_value_t = 5.0)]
        sep: f64,
    },
    /// Build a dataset from a directory of per-case PPM ROI images.
    Extract {
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// JSON file with `hematoxylin` and `eosin` OD vectors.
        #[arg(long)]
        stains: Option<PathBuf>,
    },
    /// Label-stratified train/test split.
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_train: PathBuf,
        #[arg(long)]
        out_test: PathBuf,
        #[arg(long)]
        train_frac: f64,
        #[arg(long)]
        seed: u64,
    },
    /// Train one algorithm and save the model.
    Train {
        #[arg(long)]
        algo: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Parameter override `key=value`; repeatable.
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
    },
    /// Score every case of a dataset.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a score file against a dataset's labels.
    Eval {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train and test the selected algorithms, then write the results table.
    Bench {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// `all` or a comma-separated list of algorithm names.
        #[arg(long)]
        algos: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(e: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: e.to_string(),
    }
}

fn data(e: impl ToString) -> Failure {
    Failure {
        code: EXIT_DATA,
        message: e.to_string(),
    }
}

fn training(e: MimlError) -> Failure {
    match e {
        MimlError::Validation(_) => data(e),
        e => Failure {
            code: EXIT_TRAINING,
            message: e.to_string(),
        },
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| data(MimlError::io(parent, e)))?;
    }
    fs::write(path, contents).map_err(|e| data(MimlError::io(path, e)))
}

fn parse_algos(s: &str) -> Result<Vec<Algorithm>, Failure> {
    if s.trim() == "all" {
        return Ok(Algorithm::ALL.to_vec());
    }
    let mut out = Vec::new();
    for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        let a = Algorithm::parse(name).map_err(usage)?;
        if !out.contains(&a) {
            out.push(a);
        }
    }
    if out.is_empty() {
        return Err(usage("no algorithms selected"));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::GenSynth {
            out,
            seed,
            bags,
            labels,
            dim,
            sigma,
            sep,
        } => {
            let mut cfg = SynthConfig::new(bags, labels, dim);
            cfg.sigma = sigma;
            cfg.separation = sep;
            cfg.validate().map_err(usage)?;
            let d = generate_synthetic(&cfg, seed).map_err(usage)?;
            save_dataset(&d, &out).map_err(data)
        }
        Command::Extract { images, out, stains } => {
            let m = match stains {
                Some(p) => {
                    let text = fs::read_to_string(&p).map_err(|e| data(MimlError::io(&p, e)))?;
                    StainMatrix::from_json(&text).map_err(data)?
                }
                None => StainMatrix::default(),
            };
            let d = extract_dataset(&images, &m, Execution::default()).map_err(data)?;
            save_dataset(&d, &out).map_err(data)
        }
        Command::Split {
            input,
            out_train,
            out_test,
            train_frac,
            seed,
        } => {
            if !(train_frac > 0.0 && train_frac < 1.0) {
                return Err(usage(format!("--train-frac must lie in (0, 1), got {train_frac}")));
            }
            let d = load_dataset(&input).map_err(data)?;
            let s = stratified_split(&d, train_frac, seed).map_err(data)?;
            save_dataset(&s.train, &out_train).map_err(data)?;
            save_dataset(&s.test, &out_test).map_err(data)?;
            eprintln!(
                "train {} cases, test {} cases, dropped {} unlabelled",
                s.train.len(),
                s.test.len(),
                s.dropped
            );
            Ok(())
        }
        Command::Train {
            algo,
            input,
            out,
            seed,
            params,
        } => {
            let a = Algorithm::parse(&algo).map_err(usage)?;
            let mut p: AlgorithmParams = a.default_params();
            for kv in &params {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| usage(format!("--param expects key=value, got `{kv}`")))?;
                p.set(k.trim(), v.trim()).map_err(usage)?;
            }
            p.validate().map_err(usage)?;
            let d = load_dataset(&input).map_err(data)?;
            let m = train(&d, &p, seed).map_err(training)?;
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            m.save(&out).map_err(data)
        }
        Command::Predict { model, input, out } => {
            let m = TrainedModel::load(&model).map_err(data)?;
            let d = load_dataset(&input).map_err(data)?;
            if d.manifest.label_names != m.label_names {
                return Err(data("dataset labels differ from the model's"));
            }
            let preds = predict_many(&m, &d.bags(), Execution::default()).map_err(data)?;
            let ids: Vec<&str> = d.cases.iter().map(|c| c.case_id.as_str()).collect();
            write_scores(&out, &m.label_names, &ids, &preds).map_err(data)
        }
        Command::Eval { scores, truth, out } => {
            let (names, rows) = read_scores(&scores).map_err(data)?;
            let d = load_dataset(&truth).map_err(data)?;
            if names != d.manifest.label_names {
                return Err(data("score columns differ from the dataset labels"));
            }
            let labels: HashMap<&str, &LabelSet> = d.cases.iter().map(|c| (c.case_id.as_str(), &c.labels)).collect();
            let truth_sets = rows
                .iter()
                .map(|r| {
                    labels
                        .get(r.case_id.as_str())
                        .map(|l| (*l).clone())
                        .ok_or_else(|| data(format!("case `{}` is not in the truth dataset", r.case_id)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let score_vecs: Vec<Vec<f64>> = rows.iter().map(|r| r.scores.clone()).collect();
            let decided: Vec<LabelSet> = rows.iter().map(|r| r.decided.clone()).collect();
            let report = evaluate_all(&score_vecs, &decided, &truth_sets, names.len()).map_err(data)?;
            let mut text = serde_json::to_string_pretty(&report).map_err(data)?;
            text.push('\n');
            write_file(&out, &text)
        }
        Command::Bench {
            train,
            test,
            algos,
            seed,
            report,
            format,
        } => {
            let selection: Vec<AlgorithmParams> = parse_algos(&algos)?.into_iter().map(|a| a.default_params()).collect();
            let train_set = load_dataset(&train).map_err(data)?;
            let test_set = load_dataset(&test).map_err(data)?;
            let r = run_benchmark(&train_set, &test_set, &selection, seed, Execution::default()).map_err(data)?;
            let format = match format {
                Format::Text => ReportFormat::Text,
                Format::Csv => ReportFormat::Csv,
            };
            write_file(&report, &emit_report(&r, format).map_err(data)?)?;
            let failed: Vec<String> = r
                .rows
                .iter()
                .filter_map(|row| match &row.outcome {
                    RowOutcome::Failed(m) => Some(format!("{}: {m}", row.algorithm)),
                    RowOutcome::Ok(_) => None,
                })
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_TRAINING,
                    message: failed.join("; "),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
