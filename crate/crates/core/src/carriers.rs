//! The carrier family used by the tests, goldens and CLI examples.

use crate::hierarchy::{build_hierarchy, Hierarchy};
use crate::ordinal::{closure, ClosedSet, OrdinalTerm};

/// A carrier given as the closure of its generators, with its top.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShippedCarrier {
    pub name: &'static str,
    pub generators: &'static [&'static str],
    pub top: &'static str,
}

const C20: &[&str] = &[
    "w+1", "w^(2)+1", "w^(3)+1", "w^(4)+1", "2", "w+w", "w^(2)+w^(2)", "w^(3)+w^(3)", "w^(4)+w^(4)",
    "w^(2)+w", "w^(3)+w", "w^(4)+w", "w^(3)+w^(2)", "w^(4)+w^(2)",
];

const C25: &[&str] = &[
    "w+1", "w^(2)+1", "w^(3)+1", "w^(4)+1", "2", "w+w", "w^(2)+w^(2)", "w^(3)+w^(3)", "w^(4)+w^(4)",
    "w^(2)+w", "w^(3)+w", "w^(4)+w", "w^(3)+w^(2)", "w^(4)+w^(2)", "w^(5)+1", "w^(5)+w", "w^(5)+w^(5)",
    "w^(4)+w^(3)",
];

pub const FAMILY: &[ShippedCarrier] = &[
    ShippedCarrier { name: "one", generators: &["1"], top: "w" },
    ShippedCarrier { name: "omega", generators: &["w"], top: "w^(2)" },
    ShippedCarrier { name: "omega-two", generators: &["w+w"], top: "w^(2)" },
    ShippedCarrier { name: "mixed", generators: &["w^(2)", "w+w", "w+1"], top: "w^(3)" },
    ShippedCarrier { name: "tower5", generators: &["1", "w", "w^(2)", "w^(3)", "w^(4)"], top: "w^(5)" },
    ShippedCarrier { name: "tower6", generators: &["1", "w", "w^(2)", "w^(3)", "w^(4)", "w^(5)"], top: "w^(6)" },
    ShippedCarrier { name: "c20", generators: C20, top: "w^(5)" },
    ShippedCarrier { name: "c25", generators: C25, top: "w^(6)" },
];

impl ShippedCarrier {
    pub fn carrier(&self) -> ClosedSet {
        let gens: Vec<OrdinalTerm> = self.generators.iter().map(|g| g.parse().expect("shipped term")).collect();
        closure(gens.iter())
    }

    pub fn top_term(&self) -> OrdinalTerm {
        self.top.parse().expect("shipped term")
    }

    pub fn build(&self) -> Hierarchy {
        build_hierarchy(&self.carrier(), &self.top_term()).expect("shipped carriers are below their tops")
    }
}

pub fn shipped(name: &str) -> Option<&'static ShippedCarrier> {
    FAMILY.iter().find(|c| c.name == name)
}
