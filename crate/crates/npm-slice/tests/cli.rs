//! Exit-code and stage contract of the `npm-slice` binary.
//!
//! 0 = success, 2 = usage/config error, 3 = a required earlier stage has
//! not produced its file yet, 4 = fatal IO.  Stages are rerunnable and
//! `run` is exactly the stages in order.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_npm-slice"))
}

fn run_args(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Two tiny directory packages plus a CSV manifest; returns the manifest path.
fn write_corpus(root: &Path) -> PathBuf {
    let flows = root.join("pkgs/flows");
    fs::create_dir_all(&flows).unwrap();
    fs::write(
        flows.join("index.js"),
        "var os = require('os');\nvar child = require('child_process');\nvar h = os.hostname();\nchild.exec('go ' + h);\n",
    )
    .unwrap();
    let plain = root.join("pkgs/plain");
    fs::create_dir_all(&plain).unwrap();
    fs::write(plain.join("index.js"), "var total = 1 + 2;\n").unwrap();
    let manifest = root.join("manifest.csv");
    fs::write(&manifest, "path,label\npkgs/flows,malware\npkgs/plain,benign\n").unwrap();
    manifest
}

fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        out.insert(
            entry.file_name().to_string_lossy().into_owned(),
            fs::read(entry.path()).unwrap(),
        );
    }
    out
}

#[test]
fn help_exits_zero() {
    let out = run_args(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["ingest", "slice", "score", "evaluate", "stats", "run"] {
        assert!(text.contains(sub), "--help must list the {sub} subcommand");
    }
}

#[test]
fn usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = write_corpus(tmp.path());
    let m = manifest.to_str().unwrap();
    let out_dir = tmp.path().join("out");
    let o = out_dir.to_str().unwrap();

    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["ingest", "--out", o], "requires --manifest"),
        (
            vec!["run", "--manifest", m, "--out", o, "--strategies", "psychic"],
            "unknown strategy",
        ),
        (
            vec!["run", "--manifest", m, "--out", o, "--budget", "leisurely"],
            "unknown budget preset",
        ),
        (
            vec!["run", "--manifest", m, "--out", o, "--scorer", "oracle"],
            "unknown scorer",
        ),
        (
            vec!["run", "--manifest", m, "--out", o, "--tau", "1.5"],
            "tau must be in [0,1]",
        ),
        (
            vec!["run", "--manifest", m, "--out", o, "--scorer", "remote"],
            "requires --endpoint-url",
        ),
        (
            vec!["run", "--manifest", m, "--out", o, "--scorer", "recorded"],
            "requires --recorded",
        ),
        (
            vec!["run", "--manifest", m, "--out", o, "--chunk-tokens", "0"],
            "chunk-tokens must be positive",
        ),
        (
            vec!["run", "--manifest", m, "--out", o, "--token-mode", "external"],
            "requires --tokenizer-cmd",
        ),
    ];
    for (args, needle) in cases {
        let out = run_args(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}: {}", stderr_of(&out));
        assert!(
            stderr_of(&out).contains(needle),
            "args {args:?}: stderr should mention {needle:?}, got: {}",
            stderr_of(&out)
        );
    }

    // Flags clap itself rejects.
    let out = run_args(&["run", "--manifest", m, "--out", o, "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_args(&["transmogrify"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_stage_input_exits_three_and_names_the_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = write_corpus(tmp.path());
    let m = manifest.to_str().unwrap();
    let out_dir = tmp.path().join("out");
    let o = out_dir.to_str().unwrap();

    // slice before ingest.
    let out = run_args(&["slice", "--manifest", m, "--out", o]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("`ingest`"), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("run `ingest` first"), "{}", stderr_of(&out));

    // score before slice.
    let out = run_args(&["ingest", "--manifest", m, "--out", o]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let out = run_args(&["score", "--manifest", m, "--out", o]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("`slice`"), "{}", stderr_of(&out));

    // evaluate before score.
    let out = run_args(&["slice", "--manifest", m, "--out", o, "--budget", "unlimited"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let out = run_args(&["evaluate", "--manifest", m, "--out", o]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("`score`"), "{}", stderr_of(&out));
}

#[test]
fn fatal_io_exits_four() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = write_corpus(tmp.path());
    let blocker = tmp.path().join("blocker");
    fs::write(&blocker, "a plain file where the out dir should go").unwrap();

    let out = run_args(&[
        "ingest",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("fatal"), "{}", stderr_of(&out));
}

#[test]
fn stages_compose_into_run_and_rerun_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = write_corpus(tmp.path());
    let m = manifest.to_str().unwrap();
    let staged = tmp.path().join("staged");
    let s = staged.to_str().unwrap();
    let common = ["--manifest", m, "--out", s, "--budget", "unlimited", "--scorer", "stub"];

    for stage in ["ingest", "slice", "score", "evaluate", "stats"] {
        let mut args = vec![stage];
        args.extend_from_slice(&common);
        let out = run_args(&args);
        assert_eq!(out.status.code(), Some(0), "{stage}: {}", stderr_of(&out));
    }
    let first = dir_contents(&staged);

    // Rerunning any stage over its own output reproduces the same bytes.
    for stage in ["slice", "score", "evaluate", "stats"] {
        let mut args = vec![stage];
        args.extend_from_slice(&common);
        let out = run_args(&args);
        assert_eq!(out.status.code(), Some(0), "{stage} rerun: {}", stderr_of(&out));
    }
    assert_eq!(first, dir_contents(&staged), "stage reruns must be idempotent");

    // `run` with the same knobs produces exactly the staged output.
    let all = tmp.path().join("all");
    let out = run_args(&[
        "run", "--manifest", m, "--out", all.to_str().unwrap(), "--budget", "unlimited",
        "--scorer", "stub",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert_eq!(first, dir_contents(&all), "run must equal the stages in order");
}

#[test]
fn jsonl_manifest_and_archive_packages_ingest() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();

    // One directory package and one gzipped tarball of the same shape.
    let dir_pkg = root.join("plain");
    fs::create_dir_all(&dir_pkg).unwrap();
    fs::write(dir_pkg.join("index.js"), "var total = 2;\n").unwrap();

    let tgz = root.join("wrapped.tgz");
    {
        let file = fs::File::create(&tgz).unwrap();
        let enc = flate2::write::GzEncoder::new(file, flate2::Compression::default());
        let mut tar = tar::Builder::new(enc);
        let body = b"var inner = 3;\n";
        let mut header = tar::Header::new_gnu();
        header.set_path("package/index.js").unwrap();
        header.set_size(body.len() as u64);
        header.set_mode(0o644);
        header.set_cksum();
        tar.append(&header, body.as_slice()).unwrap();
        tar.into_inner().unwrap().finish().unwrap();
    }

    let manifest = root.join("manifest.jsonl");
    fs::write(
        &manifest,
        "{\"path\": \"plain\", \"label\": \"benign\"}\n{\"path\": \"wrapped.tgz\", \"label\": \"benign\", \"id\": \"wrapped\"}\n",
    )
    .unwrap();

    let out_dir = root.join("out");
    let out = run_args(&[
        "ingest",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let log = fs::read_to_string(out_dir.join("ingest_log.jsonl")).unwrap();
    let rows: Vec<serde_json::Value> =
        log.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 2);
    for row in &rows {
        assert_eq!(row["status"], "ok", "row: {row}");
        assert_eq!(row["n_files"], 1, "row: {row}");
    }
    assert!(rows.iter().any(|r| r["id"] == "plain"));
    assert!(rows.iter().any(|r| r["id"] == "wrapped"));
}
