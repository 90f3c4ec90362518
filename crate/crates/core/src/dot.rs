//! Graphviz export of operator networks on chords.

use std::fmt::Write;

use crate::instance::{Instance, InstanceError};

/// One node per chord in canonical order, then one edge per chord for each
/// operator in the order given.
pub fn export_dot(inst: &Instance, operators: &[&str]) -> Result<String, InstanceError> {
    let reg = inst.action().registry();
    let chords = reg.chords();
    let mut perms = Vec::with_capacity(operators.len());
    for &name in operators {
        perms.push((name, inst.permutation(&inst.operator(name)?)));
    }
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(inst.name())).unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for c in &chords {
        writeln!(out, "  {};", quote(&c.to_string())).unwrap();
    }
    for (name, perm) in &perms {
        for (i, c) in chords.iter().enumerate() {
            let target = reg.chord_at(perm.apply(i));
            writeln!(
                out,
                "  {} -> {} [label={}];",
                quote(&c.to_string()),
                quote(&target.to_string()),
                quote(name)
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    Ok(out)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
