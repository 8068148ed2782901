//! Graphviz rendering: nodes in ascending order, transitively reduced
//! `le1` edges solid and `le2` edges bold.

use std::fmt::Write;

use crate::cores::Core;
use crate::hierarchy::Hierarchy;
use crate::ordinal::OrdinalTerm;
use crate::pattern::Pattern;
use crate::relation::Relation;

/// Anything with an ascending node list and two relations on it.
pub enum DotSource<'a> {
    Pattern(&'a Pattern),
    Hierarchy(&'a Hierarchy),
    Core(&'a Core),
}

fn reduced(r: &Relation) -> Vec<(usize, usize)> {
    r.strict_pairs()
        .filter(|&(i, j)| !(i + 1..j).any(|k| r.get(i, k) && r.get(k, j)))
        .collect()
}

/// Union of the witness relations of a core, on its members.
fn core_relations(c: &Core) -> (Relation, Relation) {
    let n = c.members.len();
    let pos = |t: &OrdinalTerm| c.members.binary_search(t).expect("witness universes are members");
    let mut rels = (Relation::identity(n), Relation::identity(n));
    for p in &c.patterns {
        for (a, b) in p.strict_pairs(1) {
            rels.0.set(pos(&a), pos(&b), true);
        }
        for (a, b) in p.strict_pairs(2) {
            rels.1.set(pos(&a), pos(&b), true);
        }
    }
    rels
}

pub fn export_dot(src: DotSource<'_>, sugar: bool) -> String {
    let (name, nodes, le1, le2) = match src {
        DotSource::Pattern(p) => ("pattern", p.universe().to_vec(), p.relation(1).clone(), p.relation(2).clone()),
        DotSource::Hierarchy(h) => ("hierarchy", h.terms().to_vec(), h.relation(1).clone(), h.relation(2).clone()),
        DotSource::Core(c) => {
            let (l1, l2) = core_relations(c);
            ("core", c.members.clone(), l1, l2)
        }
    };
    let mut out = format!("digraph {name} {{\n  rankdir=LR;\n");
    for (i, t) in nodes.iter().enumerate() {
        let label = if sugar { t.sugar().to_string() } else { t.to_string() };
        writeln!(out, "  n{i} [label=\"{label}\"];").unwrap();
    }
    for (i, j) in reduced(&le1) {
        writeln!(out, "  n{i} -> n{j} [style=solid];").unwrap();
    }
    for (i, j) in reduced(&le2) {
        writeln!(out, "  n{i} -> n{j} [style=bold];").unwrap();
    }
    out.push_str("}\n");
    out
}
