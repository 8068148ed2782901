//! Patterns of resemblance of order 2 at desk scale.
//!
//! Ordinals below ε₀ in Cantor normal form carry finite hierarchies whose
//! `le1`/`le2` relations are computed by elementarity games. On top of
//! those the crate searches coverings of patterns, computes isominimal
//! realizations and cores, and compares cores across hierarchies.

pub mod carrier;
pub mod carriers;
pub mod cli;
pub mod cores;
pub mod covering;
pub mod dot;
pub mod format;
pub(crate) mod embed;
pub mod hierarchy;
pub mod ordinal;
pub mod pattern;
pub mod relation;
pub mod rules;

pub use hierarchy::{build_hierarchy, build_hierarchy_with, GameBounds, Hierarchy};
pub use ordinal::{closure, induced_embedding, parse_term, ClosedSet, OrdinalTerm};
pub use pattern::{validate_pattern, Pattern, Structure, Violation};
