use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use miml::features::{write_ppm, RgbImage};
use miml::harness::{load_dataset, CASES_FILE};

fn miml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_miml")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    miml(args).status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(dir: &Path, bags: &str) {
    assert_eq!(
        code(&["gen-synth", "--out", p(dir), "--seed", "4", "--bags", bags, "--labels", "3", "--dim", "4"]),
        0
    );
}

#[test]
fn full_pipeline_runs_and_is_repeatable() {
    let t = tempfile::tempdir().unwrap();
    let root = t.path();
    synth(&root.join("all"), "60");
    assert_eq!(
        code(&[
            "split", "--in", p(&root.join("all")), "--out-train", p(&root.join("tr")), "--out-test",
            p(&root.join("te")), "--train-frac", "0.5", "--seed", "2",
        ]),
        0
    );
    assert_eq!(
        code(&[
            "train", "--algo", "mimlknn", "--in", p(&root.join("tr")), "--out", p(&root.join("m.json")), "--seed",
            "1", "--param", "r=5", "--param", "c=8",
        ]),
        0
    );
    assert_eq!(
        code(&["predict", "--model", p(&root.join("m.json")), "--in", p(&root.join("te")), "--out", p(&root.join("s.csv"))]),
        0
    );
    assert_eq!(
        code(&["eval", "--scores", p(&root.join("s.csv")), "--truth", p(&root.join("te")), "--out", p(&root.join("e.json"))]),
        0
    );
    let eval: serde_json::Value = serde_json::from_str(&fs::read_to_string(root.join("e.json")).unwrap()).unwrap();
    assert!(eval["average_precision"].as_f64().unwrap() > 0.9);

    for name in ["r1.txt", "r2.txt"] {
        assert_eq!(
            code(&[
                "bench", "--train", p(&root.join("tr")), "--test", p(&root.join("te")), "--algos", "all", "--seed", "3",
                "--report", p(&root.join(name)),
            ]),
            0
        );
    }
    let r1 = fs::read(root.join("r1.txt")).unwrap();
    assert_eq!(r1, fs::read(root.join("r2.txt")).unwrap());
    assert_eq!(String::from_utf8(r1).unwrap().lines().count(), 7);

    assert_eq!(
        code(&[
            "bench", "--train", p(&root.join("tr")), "--test", p(&root.join("te")), "--algos", "mimlrbf,kisar",
            "--seed", "3", "--report", p(&root.join("r.csv")), "--format", "csv",
        ]),
        0
    );
    assert_eq!(fs::read_to_string(root.join("r.csv")).unwrap().lines().count(), 3);
}

#[test]
fn usage_errors_exit_2() {
    let t = tempfile::tempdir().unwrap();
    synth(&t.path().join("d"), "20");
    let d = p(&t.path().join("d")).to_string();
    let out = p(&t.path().join("x")).to_string();
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["gen-synth", "--out", &out]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["train", "--algo", "nope", "--in", &d, "--out", &out, "--seed", "1"]), 2);
    assert_eq!(code(&["train", "--algo", "mimlknn", "--in", &d, "--out", &out, "--seed", "1", "--param", "r"]), 2);
    assert_eq!(code(&["train", "--algo", "mimlknn", "--in", &d, "--out", &out, "--seed", "1", "--param", "zz=1"]), 2);
    assert_eq!(code(&["split", "--in", &d, "--out-train", &out, "--out-test", &out, "--train-frac", "1.5", "--seed", "1"]), 2);
    assert_eq!(code(&["gen-synth", "--out", &out, "--seed", "1", "--bags", "5", "--labels", "0", "--dim", "2"]), 2);
    assert_eq!(code(&["bench", "--train", &d, "--test", &d, "--algos", "bogus", "--seed", "1", "--report", &out]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn data_errors_exit_3() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path().join("d");
    synth(&d, "20");
    let out = p(&t.path().join("m.json")).to_string();
    assert_eq!(code(&["train", "--algo", "m3miml", "--in", p(&t.path().join("missing")), "--out", &out, "--seed", "1"]), 3);
    let cases = d.join(CASES_FILE);
    let mut text = fs::read_to_string(&cases).unwrap();
    text.push_str("not json\n");
    fs::write(&cases, text).unwrap();
    let o = miml(&["train", "--algo", "m3miml", "--in", p(&d), "--out", &out, "--seed", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cases.jsonl:21:"));
}

#[test]
fn training_failure_exits_4() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path().join("d");
    synth(&d, "6");
    let out = p(&t.path().join("m.json")).to_string();
    assert_eq!(code(&["train", "--algo", "mimlknn", "--in", p(&d), "--out", &out, "--seed", "1", "--param", "r=10"]), 4);
}

#[test]
fn extract_builds_histogram_dataset() {
    let t = tempfile::tempdir().unwrap();
    let images = t.path().join("img");
    for (case, shades) in [("case-a", vec![[200u8, 100, 150]]), ("case-b", vec![[30, 60, 90], [250, 250, 250]])] {
        let dir = images.join(case);
        fs::create_dir_all(&dir).unwrap();
        for (k, rgb) in shades.iter().enumerate() {
            let img = RgbImage::filled(6, 5, *rgb).unwrap();
            write_ppm(&img, &dir.join(format!("roi{k}.ppm"))).unwrap();
        }
    }
    fs::write(images.join("labels.csv"), "case_id,expert_id,labels\ncase-a,e1,0;3\ncase-b,e2,4\n").unwrap();
    let out = t.path().join("ds");
    assert_eq!(code(&["extract", "--images", p(&images), "--out", p(&out)]), 0);
    let d = load_dataset(&out).unwrap();
    assert_eq!(d.dim(), 256);
    assert_eq!(d.len(), 2);
    assert_eq!(d.cases[1].bag.len(), 2);
    assert_eq!(d.cases[0].labels.as_slice(), &[0, 3]);
    assert_eq!(d.cases[0].bag[0][255], 1.0);

    fs::create_dir_all(images.join("case-c")).unwrap();
    assert_eq!(code(&["extract", "--images", p(&images), "--out", p(&out)]), 3);
}
