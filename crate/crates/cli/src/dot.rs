//! Graphviz export. Node ids are the quoted vertex labels.

use std::fmt::Write;

use aqpack::construct::TreeFamily;
use aqpack::paths::PathSystem;

const PALETTE: [&str; 9] = ["green", "red", "blue", "orange", "purple", "brown", "cyan", "magenta", "gold"];

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

/// One `graph` per tree; terminals drawn with a double border.
pub fn family_to_dot(family: &TreeFamily) -> String {
    let mut out = String::new();
    for (i, tree) in family.trees.iter().enumerate() {
        let c = color(i);
        writeln!(out, "graph tree_{} {{", i + 1).unwrap();
        writeln!(out, "  label=\"T{} (n={})\";", i + 1, family.dim).unwrap();
        writeln!(out, "  color={c};").unwrap();
        for v in tree.vertices() {
            if family.terminals.contains(&v) {
                writeln!(out, "  \"{v}\" [shape=circle, peripheries=2];").unwrap();
            } else {
                writeln!(out, "  \"{v}\" [shape=circle];").unwrap();
            }
        }
        for e in &tree.edges {
            let (a, b) = e.endpoints();
            writeln!(out, "  \"{a}\" -- \"{b}\" [color={c}];").unwrap();
        }
        writeln!(out, "}}").unwrap();
    }
    out
}

/// A single graph holding every path, endpoints double-bordered.
pub fn paths_to_dot(ps: &PathSystem) -> String {
    let mut out = String::new();
    writeln!(out, "graph paths {{").unwrap();
    writeln!(out, "  label=\"{} paths {} - {}\";", ps.paths.len(), ps.source, ps.sink).unwrap();
    for v in [ps.source, ps.sink] {
        writeln!(out, "  \"{v}\" [shape=circle, peripheries=2];").unwrap();
    }
    for (i, p) in ps.paths.iter().enumerate() {
        let c = color(i);
        for e in p.edges() {
            let (a, b) = e.endpoints();
            writeln!(out, "  \"{a}\" -- \"{b}\" [color={c}, label=\"P{}\"];", i + 1).unwrap();
        }
    }
    writeln!(out, "}}").unwrap();
    out
}

/// Splits a multi-graph DOT document into its top-level graphs.
pub fn split_graphs(text: &str) -> Vec<&str> {
    let mut graphs = Vec::new();
    let mut depth = 0usize;
    let mut start = None;
    for (i, ch) in text.char_indices() {
        match ch {
            '{' => {
                if depth == 0 {
                    start.get_or_insert(text[..i].rfind("graph").unwrap_or(0));
                }
                depth += 1;
            }
            '}' => {
                depth -= 1;
                if depth == 0 {
                    graphs.push(text[start.take().unwrap_or(0)..=i].trim());
                }
            }
            _ => {}
        }
    }
    graphs
}
