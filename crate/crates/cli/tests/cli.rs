//! End-to-end tests of the `depdist` binary: flag contracts, file formats,
//! exit codes, and output determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_depdist"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

#[test]
fn generate_exhaustive_n3_emits_nine_lines() {
    let out = run(&["generate", "--n", "3", "--mode", "exhaustive"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().map(str::trim).collect();
    assert_eq!(lines.len(), 9);
    for line in &lines {
        let (n, heads) = line.split_once('\t').expect("tabbed format");
        assert_eq!(n, "3");
        assert_eq!(heads.split(' ').count(), 3);
    }
    // All distinct.
    let set: std::collections::HashSet<&&str> = lines.iter().collect();
    assert_eq!(set.len(), 9);
}

#[test]
fn generate_sample_is_deterministic() {
    let args = ["generate", "--n", "12", "--mode", "sample", "--count", "1000", "--seed", "1"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_str(&a).lines().count(), 1000);
    // Different seed, different stream.
    let c = run(&["generate", "--n", "12", "--mode", "sample", "--count", "1000", "--seed", "2"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn generate_exhaustive_refuses_large_n() {
    let out = run(&["generate", "--n", "12", "--mode", "exhaustive"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("usage error"), "stderr: {err}");
    assert!(err.contains("refusing"), "stderr: {err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn classify_annotates_lines() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("structures.txt");
    // A chain, the ill-nested fixture, and the non-1EC fixture.
    std::fs::write(&input, "4\t0 1 2 3\n5\t0 1 1 2 3\n6\t0 1 1 1 2 3\n").unwrap();
    let out = run(&["classify", input.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        stdout_str(&out),
        "4\t0 1 2 3\t1,1,1,1\n5\t0 1 1 2 3\t0,0,0,1\n6\t0 1 1 1 2 3\t0,0,0,0\n"
    );
}

#[test]
fn classify_empty_input_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.txt");
    std::fs::write(&input, "").unwrap();
    let out = run(&["classify", input.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn classify_reports_malformed_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.txt");
    std::fs::write(&input, "3\t0 1 2\n3\t0 1\n").unwrap();
    let out = run(&["classify", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("data error"), "stderr: {err}");
    assert!(err.contains("line 2"), "stderr: {err}");
}

#[test]
fn classify_round_trips_generate_output() {
    let dir = tempfile::tempdir().unwrap();
    let structures = dir.path().join("gen.txt");
    let annotated = dir.path().join("gen.classified.txt");
    let out = run(&[
        "generate", "--n", "7", "--mode", "sample", "--count", "200", "--seed", "5",
        "--out", structures.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&[
        "classify",
        structures.to_str().unwrap(),
        "--out",
        annotated.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&annotated).unwrap();
    assert_eq!(text.lines().count(), 200);
    for line in text.lines() {
        let fields: Vec<&str> = line.split('\t').collect();
        assert_eq!(fields.len(), 3);
        assert_eq!(fields[2].split(',').count(), 4);
    }
}

#[test]
fn survey_row_all_n5_is_exact_baseline() {
    let out = run(&[
        "survey", "--n-min", "3", "--n-max", "6", "--n-star", "6", "--classes", "all",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "source,class,n,count,p,sum_D,mean_d,baseline,reported,mean_d_float"
    );
    let n5 = text.lines().find(|l| l.starts_with("AS,all,5,")).expect("n=5 row");
    let fields: Vec<&str> = n5.split(',').collect();
    assert_eq!(fields[3], "625"); // count
    assert_eq!(fields[4], "1/1"); // p
    assert_eq!(fields[6], "2/1"); // mean_d = (5+1)/3
    assert_eq!(fields[7], "2/1"); // baseline
    assert_eq!(fields[8], "true");
    assert_eq!(fields[9], "2");
}

#[test]
fn survey_rejects_unsupported_class() {
    let out = run(&["survey", "--classes", "all,mh4"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mh4"), "stderr: {err}");
    assert!(err.contains("unsupported"), "stderr: {err}");
}

#[test]
fn survey_rejects_unknown_class_and_bad_config() {
    let out = run(&["survey", "--classes", "sideways"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown class"));
    let out = run(&["survey", "--n-min", "8", "--n-max", "5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn survey_keep_undersampled_marks_rows_instead_of_dropping() {
    let base = [
        "survey", "--n-min", "3", "--n-max", "11", "--n-star", "5", "--samples", "300",
        "--seed", "3", "--classes", "projective",
    ];
    let dropped = run(&base);
    assert!(dropped.status.success());
    let kept = run(&[&base[..], &["--keep-undersampled"]].concat());
    assert!(kept.status.success());
    let dropped = stdout_str(&dropped);
    let kept = stdout_str(&kept);
    // Projective structures at n=11 are rare in 300 draws: the row only
    // shows up under --keep-undersampled, flagged unreported.
    let row11: Vec<&str> = kept
        .lines()
        .filter(|l| l.starts_with("AS,projective,11,"))
        .collect();
    assert_eq!(row11.len(), 1);
    assert!(row11[0].contains(",false,"));
    assert!(!dropped.lines().any(|l| l.starts_with("AS,projective,11,")));
    // Exhaustive rows are always reported.
    assert!(dropped.lines().any(|l| l.starts_with("AS,projective,5,")));
}

#[test]
fn survey_json_format_parses() {
    let out = run(&[
        "survey", "--n-min", "3", "--n-max", "4", "--n-star", "4", "--classes",
        "all,projective", "--format", "json",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let proj3 = rows
        .iter()
        .find(|r| r["class"] == "projective" && r["n"] == 3)
        .unwrap();
    assert_eq!(proj3["count"], 7);
    assert_eq!(proj3["p"], "7/9");
    assert_eq!(proj3["mean_d"], "9/7");
    assert_eq!(proj3["source"], "AS");
}

#[test]
fn survey_writes_manifest_alongside_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let out = run(&[
        "survey", "--n-min", "3", "--n-max", "5", "--n-star", "4", "--samples", "500",
        "--seed", "11", "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let manifest_path = dir.path().join("rows.csv.manifest.json");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["tool"]["name"], "depdist");
    assert_eq!(manifest["command"], "survey");
    assert_eq!(manifest["config"]["seed"], 11);
    assert_eq!(manifest["per_length_structures"]["3"], 9);
    assert_eq!(manifest["per_length_structures"]["5"], 500);
    assert!(manifest["wall_clock_seconds"].is_number());
    // Re-running the manifest's configuration reproduces the CSV exactly.
    let csv2 = dir.path().join("rows2.csv");
    let out = run(&[
        "survey", "--n-min", "3", "--n-max", "5", "--n-star", "4", "--samples", "500",
        "--seed", "11", "--out", csv2.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(&csv).unwrap(),
        std::fs::read(&csv2).unwrap()
    );
}

#[test]
fn treebank_surveys_fixture() {
    let out = run(&["treebank", data("sample.conllu").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let n4 = text.lines().find(|l| l.starts_with("RS,all,4,")).expect("n=4 row");
    let fields: Vec<&str> = n4.split(',').collect();
    assert_eq!(fields[3], "40");
    assert_eq!(fields[6], "23/20");
    // The 8-sentence n=5 cell is filtered by default...
    assert!(!text.lines().any(|l| l.starts_with("RS,all,5,")));
    // ...and flagged when kept.
    let kept = run(&[
        "treebank",
        data("sample.conllu").to_str().unwrap(),
        "--keep-undersampled",
    ]);
    let kept = stdout_str(&kept);
    let n5 = kept.lines().find(|l| l.starts_with("RS,all,5,")).expect("kept n=5 row");
    assert!(n5.contains(",false,"));
}

#[test]
fn treebank_accepts_gzip() {
    let out = run(&[
        "treebank",
        data("tiny.conllu.gz").to_str().unwrap(),
        "--keep-undersampled",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let row = text.lines().find(|l| l.starts_with("RS,all,3,")).expect("n=3 row");
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[3], "5");
    assert_eq!(fields[6], "1/1"); // chains: every dependency adjacent
}

#[test]
fn treebank_missing_file_is_data_error() {
    let out = run(&["treebank", "/nonexistent/zilch.conllu"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn treebank_custom_punct_tags() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sym.conllu");
    std::fs::write(
        &file,
        "1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n\
         2\t$\t_\tSYM\t_\t_\t1\tdep\t_\t_\n\
         3\tb\t_\tX\t_\t_\t1\tdep\t_\t_\n\
         4\tc\t_\tX\t_\t_\t3\tdep\t_\t_\n\n",
    )
    .unwrap();
    let with_default = run(&["treebank", file.to_str().unwrap(), "--keep-undersampled"]);
    assert!(stdout_str(&with_default).lines().any(|l| l.starts_with("RS,all,4,")));
    let with_sym = run(&[
        "treebank",
        file.to_str().unwrap(),
        "--punct-tags",
        "PUNCT,SYM",
        "--keep-undersampled",
    ]);
    assert!(stdout_str(&with_sym).lines().any(|l| l.starts_with("RS,all,3,")));
}

#[test]
fn help_and_bad_flags_exit_codes() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let bad = run(&["survey", "--no-such-flag"]);
    assert_eq!(bad.status.code(), Some(1));
    let no_args = run(&[]);
    assert_eq!(no_args.status.code(), Some(1));
}

#[test]
fn stdout_stays_clean_of_progress() {
    let out = run(&[
        "survey", "--n-min", "3", "--n-max", "4", "--n-star", "4", "--classes", "all",
    ]);
    assert!(out.status.success());
    // Progress goes to stderr; stdout holds the CSV alone.
    assert!(stdout_str(&out).starts_with("source,class,"));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}
