//! Prompt assembly and scoring.  Every slice becomes one strictly
//! formatted prompt; the reply must be a single JSON object with exactly
//! four [0,1] fields.  The offline stub scorer keeps the whole pipeline
//! runnable without network access or keys.
//!
//!     cargo run --example score_slices

use npm_slice::cpg::{assemble_cpg, build_cfg, build_dfg, parse_file};
use npm_slice::ingest::PackageRef;
use npm_slice::scoring::BUILTIN_TEMPLATE;
use npm_slice::{
    build_prompt, builtin_catalog, parse_score, taint_slice, SliceBudget, StubScorer, Scorer,
};

const SRC: &str = r#"const fs = require('fs');
const cp = require('child_process');
const recipe = fs.readFileSync('./payload.txt', 'utf8');
cp.exec(recipe);
"#;

fn main() {
    let mut fg = parse_file("index.js", SRC);
    build_cfg(&mut fg);
    build_dfg(&mut fg);
    let cpg = assemble_cpg(PackageRef::from_path("demo-pkg"), vec![fg]);
    let run = taint_slice(&cpg, &builtin_catalog(), &SliceBudget::unlimited());
    let slice = run.slices.first().expect("source-to-sink flow produces a slice");

    let bundle = build_prompt(slice, BUILTIN_TEMPLATE).unwrap();
    println!("== prompt for {} ==", bundle.slice_ref);
    println!("system text: {} chars (fixed contract)", bundle.system_text.len());
    println!("user text (the snippet, byte for byte):");
    for line in bundle.user_text.lines() {
        println!("  | {line}");
    }

    let scorer = StubScorer::new(builtin_catalog());
    let record = scorer.score(&bundle);
    println!("\n== stub verdict ==");
    let scores = record.scores.as_ref().expect("stub always scores");
    println!("  confidence   = {:.2}", scores.confidence);
    println!("  obfuscated   = {:.2}", scores.obfuscated);
    println!("  malware      = {:.2}", scores.malware);
    println!("  securityRisk = {:.2}", scores.security_risk);

    // The reply parser is the other half of the contract: strict on
    // shape, tolerant only of whitespace and a single code fence.
    println!("\n== reply parsing ==");
    let good = "```json\n{\"confidence\":0.95,\"obfuscated\":0.0,\"malware\":0.9,\"securityRisk\":0.95}\n```";
    println!("  fenced single object: {:?}", parse_score(good).map(|s| s.malware));
    for bad in [
        "not json at all",
        "{\"confidence\":0.9}",
        "{\"confidence\":0.9,\"obfuscated\":0.0,\"malware\":1.7,\"securityRisk\":0.9}",
        "{\"confidence\":0.9,\"obfuscated\":0.0,\"malware\":0.9,\"securityRisk\":0.9} {\"again\":1}",
    ] {
        match parse_score(bad) {
            Ok(_) => println!("  unexpectedly parsed: {bad}"),
            Err(e) => println!("  rejected ({e})"),
        }
    }
}
