//! The no-analysis baseline: split each file into fixed-size token
//! chunks.  Chunk boundaries are token-exact — the half-open token
//! ranges tile the file with no gap or overlap — while each snippet
//! renders every line the chunk touches, so a line cut mid-way appears
//! in both neighboring snippets.
//!
//!     cargo run --example chunking_baseline

use npm_slice::{baseline_chunks, count_tokens, open_package, TokenMode};

fn main() {
    let root = tempfile::tempdir().expect("temp dir");
    let dir = root.path().join("fib-pkg");
    std::fs::create_dir_all(&dir).unwrap();
    let src = r#"function fib(n) {
  if (n < 2) return n;
  return fib(n - 1) + fib(n - 2);
}
const fs = require('fs');
const lines = [];
for (let i = 0; i < 40; i++) {
  lines.push('fib(' + i + ') = ' + fib(i));
}
fs.writeFileSync('./table.txt', lines.join('\n'));
console.log('done');
"#;
    std::fs::write(dir.join("index.js"), src).unwrap();
    let files = open_package(&dir).expect("package opens");

    let total = count_tokens(src, &TokenMode::Approx).unwrap();
    println!("file: {} lines, {total} approx tokens", src.lines().count());

    // An artificially small chunk size so the split is visible; the
    // pipeline default is 500 tokens.
    let max = 25;
    let run = baseline_chunks(&files, max);
    println!("chunks of <={max} tokens: {}\n", run.slices.len());

    let mut expected_start = 0usize;
    for s in &run.slices {
        let (start, end) = s.token_range.unwrap();
        assert_eq!(start, expected_start, "ranges tile the file");
        assert!(end - start <= max, "no chunk exceeds the cap");
        expected_start = end;
        let lines = &s.lines["index.js"];
        println!(
            "  [{}] tokens {start:>3}..{end:>3}  rendered lines {:>2}-{:>2}",
            s.slice_ref(),
            lines.first().unwrap(),
            lines.last().unwrap(),
        );
    }
    assert_eq!(expected_start, total);
    println!("\ntoken ranges partition 0..{total} exactly; every chunk <= {max} tokens");

    let boundary = &run.slices[0].lines["index.js"];
    let next = &run.slices[1].lines["index.js"];
    println!(
        "snippets overlap only on the cut line: chunk 0 ends at line {}, chunk 1 starts at line {}",
        boundary.last().unwrap(),
        next.first().unwrap()
    );
}
