//! Parse one JavaScript file into a code property graph and walk its
//! layers: AST containment, control flow, and reaching-definition data flow.
//!
//!     cargo run --example build_cpg

use npm_slice::cpg::{assemble_cpg, build_cfg, build_dfg, parse_file, EdgeLayer};
use npm_slice::ingest::PackageRef;

const SRC: &str = r#"const os = require('os');
const host = os.hostname();
let payload = host;
if (payload.length > 3) {
  payload = payload + '!';
}
require('child_process').exec('echo ' + payload);
"#;

fn main() {
    let mut fg = parse_file("index.js", SRC);
    build_cfg(&mut fg);
    build_dfg(&mut fg);
    let cpg = assemble_cpg(PackageRef::from_path("demo-pkg"), vec![fg]);

    println!("== nodes ({} total) ==", cpg.nodes.len());
    for n in cpg.nodes.iter().filter(|n| n.is_statement) {
        println!(
            "  #{:<3} {:<12} L{:<2} {}",
            n.id,
            format!("{:?}", n.kind),
            n.line,
            n.code.lines().next().unwrap_or("")
        );
    }

    let count = |layer: EdgeLayer| cpg.edges.iter().filter(|e| e.layer == layer).count();
    println!("\n== edges ==");
    println!("  ast: {}", count(EdgeLayer::Ast));
    println!("  cfg: {}", count(EdgeLayer::Cfg));
    println!("  dfg: {}", count(EdgeLayer::Dfg));

    // Follow the taint of `host` through the reaching-definition layer.
    let def = cpg
        .nodes
        .iter()
        .find(|n| n.is_statement && n.code.contains("os.hostname"))
        .expect("hostname assignment present");
    println!("\n== data flow out of `{}` ==", def.code.trim());
    let mut frontier = vec![def.id];
    let mut seen = std::collections::BTreeSet::from([def.id]);
    while let Some(id) = frontier.pop() {
        for &next in cpg.dfg_succs(id) {
            if seen.insert(next) {
                let n = cpg.node(next);
                println!("  reaches #{:<3} L{} {}", n.id, n.line, n.code.trim());
                frontier.push(next);
            }
        }
    }

    println!("\n== control-flow graph (dot) ==");
    let mut dot = Vec::new();
    cpg.dump_dot_cfg("index.js", &mut dot).unwrap();
    println!("{}", String::from_utf8(dot).unwrap());

    if !cpg.diagnostics.is_empty() {
        println!("== diagnostics ==");
        for d in &cpg.diagnostics {
            println!("  {}:{} {}", d.file, d.line, d.message);
        }
    }
}
