//! Graphviz output. Vertices are circles, edges are lines, and each cell of
//! dimension 2 or more is a small point joined to its vertices by dotted
//! lines. Cells in a section's support are drawn in red.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::sync::Arc;

use sheafnet::activation::ActivationSheaf;
use sheafnet::{CellId, NodeId, SimplicialComplex};

use crate::report::View;

fn graph_name(time: Option<i64>, suffix: &str) -> String {
    match time {
        Some(t) => format!("slice_{t}{suffix}"),
        None => format!("link_complex{suffix}"),
    }
}

fn render(out: &mut String, name: &str, x: &SimplicialComplex<NodeId>, support: &BTreeSet<CellId>) {
    let hot = |c: CellId| support.contains(&c);
    writeln!(out, "graph {name} {{").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for (c, cell) in x.cells().iter().enumerate() {
        let vs = cell.vertices();
        match vs.len() {
            1 if hot(c) => writeln!(out, "  \"{}\" [style=filled, fillcolor=red];", vs[0]).unwrap(),
            1 => writeln!(out, "  \"{}\";", vs[0]).unwrap(),
            2 if hot(c) => writeln!(out, "  \"{}\" -- \"{}\" [color=red, penwidth=2];", vs[0], vs[1]).unwrap(),
            2 => writeln!(out, "  \"{}\" -- \"{}\";", vs[0], vs[1]).unwrap(),
            _ => {
                let id = format!("{cell}");
                let color = if hot(c) { "red" } else { "gray" };
                writeln!(out, "  \"{id}\" [shape=point, color={color}, xlabel=\"{id}\"];").unwrap();
                for v in vs {
                    writeln!(out, "  \"{id}\" -- \"{v}\" [style=dotted, color={color}];").unwrap();
                }
            }
        }
    }
    writeln!(out, "}}").unwrap();
}

pub fn complexes(views: &[View]) -> String {
    let mut out = String::new();
    for v in views {
        render(&mut out, &graph_name(v.time, ""), &v.complex, &BTreeSet::new());
    }
    out
}

/// One graph per global section, highlighting its support.
pub fn sections(views: &[View]) -> String {
    let mut out = String::new();
    for v in views {
        let sheaf = ActivationSheaf::new(Arc::clone(&v.complex));
        for (i, s) in sheaf.enumerate_global_sections().iter().enumerate() {
            render(
                &mut out,
                &graph_name(v.time, &format!("_section_{i}")),
                &v.complex,
                &s.support(),
            );
        }
    }
    out
}
