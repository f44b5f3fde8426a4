//! Control-flow edges over statement nodes.
//!
//! Each statement chain is wired head-to-tail; `if` forks and rejoins, loops
//! add a back edge, `try` routes its body into the catch handler.  Function
//! bodies are entered from the statement where the function literal occurs
//! and, for callbacks, from every call statement that receives the function
//! as an argument — that linkage is what lets flows follow values into
//! asynchronous continuations.

use std::collections::HashSet;

use super::lower::Shape;
use super::FileGraph;

pub(crate) fn build(fg: &mut FileGraph) {
    // Resolve by-name callback arguments against declared functions.
    let refs = std::mem::take(&mut fg.aux.name_callback_refs);
    for (call_stmt, name) in &refs {
        if let Some(&idx) = fg.aux.named_funcs.get(name) {
            if !fg.aux.funcs[idx].spawned_by.contains(call_stmt) {
                fg.aux.funcs[idx].spawned_by.push(*call_stmt);
            }
        }
    }
    fg.aux.name_callback_refs = refs;

    let mut edges: Vec<(u32, u32)> = Vec::new();
    chain(&mut edges, &fg.aux.shapes);
    for i in 0..fg.aux.funcs.len() {
        let (entry, _) = chain(&mut edges, &fg.aux.funcs[i].body);
        if let Some(e) = entry {
            let f = &fg.aux.funcs[i];
            let mut sites = vec![f.site_stmt];
            for s in &f.spawned_by {
                if !sites.contains(s) {
                    sites.push(*s);
                }
            }
            for s in sites {
                edges.push((s, e));
            }
        }
    }

    let mut seen = HashSet::new();
    edges.retain(|e| seen.insert(*e));
    fg.cfg_edges = edges;
}

/// Entry statement of a shape chain (used by the data-flow pass to seed
/// parameter definitions).
pub(crate) fn chain_entry(shapes: &[Shape]) -> Option<u32> {
    shapes.first().map(shape_head)
}

fn shape_head(s: &Shape) -> u32 {
    match s {
        Shape::Plain(n) | Shape::NoFall(n) => *n,
        Shape::If { head, .. } | Shape::Loop { head, .. } | Shape::Try { head, .. } => *head,
    }
}

/// Wire a statement sequence; returns `(entry, exit statements)`.
fn chain(edges: &mut Vec<(u32, u32)>, shapes: &[Shape]) -> (Option<u32>, Vec<u32>) {
    let mut entry = None;
    let mut prev_exits: Vec<u32> = Vec::new();
    for sh in shapes {
        let (e, exits) = wire(edges, sh);
        if entry.is_none() {
            entry = Some(e);
        }
        for p in &prev_exits {
            edges.push((*p, e));
        }
        prev_exits = exits;
    }
    (entry, prev_exits)
}

fn wire(edges: &mut Vec<(u32, u32)>, shape: &Shape) -> (u32, Vec<u32>) {
    match shape {
        Shape::Plain(n) => (*n, vec![*n]),
        Shape::NoFall(n) => (*n, Vec::new()),
        Shape::If { head, cons, alt } => {
            let mut exits = Vec::new();
            let (centry, cexits) = chain(edges, cons);
            match centry {
                Some(e) => {
                    edges.push((*head, e));
                    exits.extend(cexits);
                }
                None => exits.push(*head),
            }
            match alt {
                Some(a) => {
                    let (aentry, aexits) = chain(edges, a);
                    match aentry {
                        Some(e) => {
                            edges.push((*head, e));
                            exits.extend(aexits);
                        }
                        None => exits.push(*head),
                    }
                }
                None => exits.push(*head),
            }
            (*head, exits)
        }
        Shape::Loop { head, body } => {
            let (bentry, bexits) = chain(edges, body);
            if let Some(e) = bentry {
                edges.push((*head, e));
                for x in bexits {
                    edges.push((x, *head));
                }
            }
            (*head, vec![*head])
        }
        Shape::Try { head, body, catch, finally } => {
            let (bentry, bexits) = chain(edges, body);
            if let Some(e) = bentry {
                edges.push((*head, e));
            }
            let mut tails: Vec<u32> = if bentry.is_some() { bexits } else { vec![*head] };
            if let Some((chead, cbody)) = catch {
                // Any point of the protected block may divert to the handler;
                // the block is a chain, so its tail (plus the head, in case
                // the block never falls through) covers it transitively.
                for t in &tails {
                    edges.push((*t, *chead));
                }
                edges.push((*head, *chead));
                let (centry, cexits) = chain(edges, cbody);
                match centry {
                    Some(e) => {
                        edges.push((*chead, e));
                        tails.extend(cexits);
                    }
                    None => tails.push(*chead),
                }
            }
            if let Some(fin) = finally {
                let (fentry, fexits) = chain(edges, fin);
                if let Some(e) = fentry {
                    if tails.is_empty() {
                        edges.push((*head, e));
                    }
                    for t in &tails {
                        edges.push((*t, e));
                    }
                    tails = fexits;
                }
            }
            (*head, tails)
        }
    }
}
