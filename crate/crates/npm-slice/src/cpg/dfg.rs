//! Data-flow edges: reaching definitions over the statement-level CFG.
//!
//! One flat name space per file.  A statement that strongly defines a
//! variable (declaration, plain assignment) kills earlier definitions;
//! property writes and parameters define weakly, so earlier definitions
//! survive alongside them.  Parameters of a function are seeded at its entry
//! statement and attributed to the call statements that spawn the function as
//! a callback (its own declaration site otherwise) — that is how a value
//! passed to `fs.readFile(p, (err, data) => …)` reaches uses of `data`.
//! Definitions captured by closures travel through the same graph because
//! function bodies are wired to their spawn/occurrence sites in the CFG.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::cfg::chain_entry;
use super::{Diagnostic, FileGraph};

type Defs = BTreeMap<String, BTreeSet<u32>>;

pub(crate) fn build(fg: &mut FileGraph) {
    let stmt_ids: Vec<u32> =
        fg.nodes.iter().filter(|n| n.is_statement).map(|n| n.id).collect();
    if stmt_ids.is_empty() {
        return;
    }

    let mut preds: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut succs: HashMap<u32, Vec<u32>> = HashMap::new();
    for &(a, b) in &fg.cfg_edges {
        preds.entry(b).or_default().push(a);
        succs.entry(a).or_default().push(b);
    }

    // Parameter seeds at each function-body entry.
    let mut seeds: HashMap<u32, Vec<(u32, String)>> = HashMap::new();
    for f in &fg.aux.funcs {
        if let Some(entry) = chain_entry(&f.body) {
            let attrs: Vec<u32> = if f.spawned_by.is_empty() {
                vec![f.site_stmt]
            } else {
                f.spawned_by.clone()
            };
            for p in &f.params {
                for &a in &attrs {
                    seeds.entry(entry).or_default().push((a, p.clone()));
                }
            }
        }
    }

    let mut input: HashMap<u32, Defs> = HashMap::new();
    let mut output: HashMap<u32, Defs> = HashMap::new();
    let mut queue: VecDeque<u32> = stmt_ids.iter().copied().collect();
    let mut queued: BTreeSet<u32> = stmt_ids.iter().copied().collect();
    let cap = 200 * stmt_ids.len() + 1000;
    let mut pops = 0usize;

    while let Some(s) = queue.pop_front() {
        queued.remove(&s);
        pops += 1;
        if pops > cap {
            let node = &fg.nodes[s as usize];
            fg.diagnostics.push(Diagnostic {
                file: fg.rel_path.clone(),
                line: node.line,
                message: "data-flow propagation did not settle; results truncated".to_string(),
            });
            break;
        }

        let mut inset: Defs = Defs::new();
        if let Some(sd) = seeds.get(&s) {
            for (at, var) in sd {
                inset.entry(var.clone()).or_default().insert(*at);
            }
        }
        if let Some(ps) = preds.get(&s) {
            for p in ps {
                if let Some(po) = output.get(p) {
                    for (var, defs) in po {
                        inset.entry(var.clone()).or_default().extend(defs.iter().copied());
                    }
                }
            }
        }

        let info = &fg.aux.stmt_info[s as usize];
        let mut outset = inset.clone();
        for v in &info.strong_defs {
            outset.remove(v);
        }
        for v in &info.strong_defs {
            outset.entry(v.clone()).or_default().insert(s);
        }
        for v in &info.weak_defs {
            outset.entry(v.clone()).or_default().insert(s);
        }

        input.insert(s, inset);
        let changed = output.get(&s) != Some(&outset);
        if changed {
            output.insert(s, outset);
            if let Some(ss) = succs.get(&s) {
                for &t in ss {
                    if fg.nodes[t as usize].is_statement && queued.insert(t) {
                        queue.push_back(t);
                    }
                }
            }
        }
    }

    let mut edges: Vec<(u32, u32)> = Vec::new();
    for &s in &stmt_ids {
        let info = &fg.aux.stmt_info[s as usize];
        if info.uses.is_empty() {
            continue;
        }
        if let Some(inset) = input.get(&s) {
            for v in &info.uses {
                if let Some(defs) = inset.get(v) {
                    for &d in defs {
                        if d != s {
                            edges.push((d, s));
                        }
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    fg.dfg_edges = edges;
}
