//! Isominimal realizations, bounded cores and their comparison, the
//! pattern test relative to a hierarchy, and longest `le2` chains.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::ops::ControlFlow;

use rayon::prelude::*;
use thiserror::Error;

use crate::covering::{first_covering, visit_coverings, Constraints, Covering};
use crate::format::hierarchy_digest;
use crate::hierarchy::Hierarchy;
use crate::ordinal::OrdinalTerm;
use crate::pattern::{find_isomorphism, relations_valid, validate_pattern, Pattern, Structure, Violation};
use crate::relation::Relation;

/// Outcome of [`isominimal`] for one covered pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsominimalReport {
    /// `H` restricted to the chosen pointwise-minimal cover.
    pub realization: Pattern,
    /// The order isomorphism from the pattern onto the realization.
    pub assignment: BTreeMap<OrdinalTerm, OrdinalTerm>,
    /// Exactly one cover is pointwise-minimal.
    pub unique_minimum: bool,
    /// The realization is pointwise below every cover.
    pub below_every_cover: bool,
    /// The pattern is isomorphic to its realization.
    pub isomorphic: bool,
    pub cover_count: usize,
}

fn pw_le(x: &[usize], y: &[usize]) -> bool {
    x.iter().zip(y).all(|(a, b)| a <= b)
}

/// Ranges of every covering of `p` (ascending carrier indices), in search order.
fn cover_ranges(p: &Pattern, host: &Hierarchy) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let _ = visit_coverings(p, host, &Constraints::default(), &mut |el| {
        out.push(el.to_vec());
        ControlFlow::Continue(())
    });
    out
}

/// A pointwise-minimal closed substructure of `host` covering `p`, or
/// `None` when `p` is not covered.
pub fn isominimal(p: &Pattern, host: &Hierarchy) -> Option<IsominimalReport> {
    let covers = cover_ranges(p, host);
    let minimal: Vec<&Vec<usize>> = covers
        .iter()
        .filter(|q| !covers.iter().any(|r| r != *q && pw_le(r, q)))
        .collect();
    let best = *minimal.first()?;
    let realization = host.substructure(best);
    let assignment = p
        .universe()
        .iter()
        .cloned()
        .zip(realization.universe().iter().cloned())
        .collect();
    Some(IsominimalReport {
        below_every_cover: covers.iter().all(|q| pw_le(best, q)),
        isomorphic: find_isomorphism(p, &realization).is_some(),
        unique_minimum: minimal.len() == 1,
        cover_count: covers.len(),
        realization,
        assignment,
    })
}

/// Closed subsets of the carrier with at most `max_indec` indecomposables,
/// ordered by indecomposable count and then by their index lists.
pub(crate) fn closed_subsets(host: &Hierarchy, max_indec: usize) -> Vec<Vec<usize>> {
    let carrier = host.carrier();
    let indecs = carrier.indecomposables();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for k in 0..=max_indec.min(indecs.len()) {
        for chosen in crate::hierarchy::subsets(indecs, k) {
            let allowed: Vec<usize> = (0..carrier.len())
                .filter(|&x| !carrier.is_indecomposable(x) && x != 0)
                .filter(|&x| carrier.summands(x).iter().all(|s| chosen.binary_search(s).is_ok()))
                .collect();
            let start = carrier.closure(&chosen);
            let mut seen: HashSet<Vec<usize>> = HashSet::from([start.clone()]);
            let mut stack = vec![start];
            while let Some(set) = stack.pop() {
                for &x in &allowed {
                    if set.binary_search(&x).is_err() {
                        let mut gens = set.clone();
                        gens.push(x);
                        let next = carrier.closure(&gens);
                        if seen.insert(next.clone()) {
                            stack.push(next);
                        }
                    }
                }
            }
            let mut found: Vec<Vec<usize>> = seen.into_iter().collect();
            found.sort();
            out.extend(found);
        }
    }
    out
}

/// Summand positions of each element, the arithmetic shape of a closed set.
fn shape_key(host: &Hierarchy, set: &[usize]) -> Vec<Vec<usize>> {
    let carrier = host.carrier();
    let indecs: Vec<usize> = set.iter().copied().filter(|&x| carrier.is_indecomposable(x)).collect();
    set.iter()
        .map(|&x| carrier.summands(x).iter().map(|s| indecs.binary_search(s).unwrap()).collect())
        .collect()
}

/// Every valid pair of relations on `n` points whose strict pairs come
/// from `cand1` (and `cand2` for `le2`).
pub(crate) fn valid_relations(n: usize, cand1: &[(usize, usize)], cand2: &[(usize, usize)]) -> Vec<(Relation, Relation)> {
    let mut out = Vec::new();
    for m1 in 0u64..1 << cand1.len() {
        let mut le1 = Relation::identity(n);
        for (bit, &(i, j)) in cand1.iter().enumerate() {
            if m1 >> bit & 1 == 1 {
                le1.set(i, j, true);
            }
        }
        if !relations_valid(&le1, &Relation::identity(n)) {
            continue;
        }
        let usable: Vec<(usize, usize)> = cand2.iter().copied().filter(|&(i, j)| le1.get(i, j)).collect();
        for m2 in 0u64..1 << usable.len() {
            let mut le2 = Relation::identity(n);
            for (bit, &(i, j)) in usable.iter().enumerate() {
                if m2 >> bit & 1 == 1 {
                    le2.set(i, j, true);
                }
            }
            if relations_valid(&le1, &le2) {
                out.push((le1.clone(), le2.clone()));
            }
        }
    }
    out
}

/// First-seen position, representative subset, and the relation pairs found on any subset of the shape.
type ShapeEntry = (usize, Vec<usize>, BTreeSet<(Vec<(usize, usize)>, Vec<(usize, usize)>)>);

/// The covered patterns with at most `max_indec` indecomposables, one per
/// isomorphism type, in canonical order: indecomposable count, universe,
/// then strict `le1` and `le2` pairs. Each type is represented on the
/// first closed subset of the carrier with its shape.
pub fn covered_patterns(host: &Hierarchy, max_indec: usize) -> Vec<Pattern> {
    let mut shapes: BTreeMap<Vec<Vec<usize>>, ShapeEntry> = BTreeMap::new();
    let mut order = Vec::new();
    for set in closed_subsets(host, max_indec) {
        let key = shape_key(host, &set);
        let entry = shapes.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            (order.len() - 1, set.clone(), BTreeSet::new())
        });
        let n = set.len();
        let local = |k: u8| -> Vec<(usize, usize)> {
            let r = host.relation(k).restrict(&set);
            r.strict_pairs().collect()
        };
        for (le1, le2) in valid_relations(n, &local(1), &local(2)) {
            entry.2.insert((le1.strict_pairs().collect(), le2.strict_pairs().collect()));
        }
    }
    let mut out = Vec::new();
    for key in order {
        let (_, set, rels) = &shapes[&key];
        let universe: Vec<OrdinalTerm> = set.iter().map(|&i| host.terms()[i].clone()).collect();
        for (p1, p2) in rels {
            let mut le1 = Relation::identity(set.len());
            let mut le2 = Relation::identity(set.len());
            for &(i, j) in p1 {
                le1.set(i, j, true);
            }
            for &(i, j) in p2 {
                le2.set(i, j, true);
            }
            out.push(Pattern::from_parts(universe.clone(), le1, le2));
        }
    }
    out
}

/// Union of the isominimal realizations of all covered patterns with at
/// most `size_bound` indecomposables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Core {
    /// Digest of the host hierarchy file.
    pub host: String,
    pub size_bound: usize,
    /// Ascending.
    pub members: Vec<OrdinalTerm>,
    /// Distinct realizations, in the order they were first produced.
    pub patterns: Vec<Pattern>,
    /// Each member's first realization containing it, as an index into `patterns`.
    pub witness: BTreeMap<OrdinalTerm, usize>,
}

impl Core {
    pub fn witness_pattern(&self, member: &OrdinalTerm) -> Option<&Pattern> {
        self.witness.get(member).map(|&i| &self.patterns[i])
    }
}

pub fn compute_core(host: &Hierarchy, size_bound: usize) -> Core {
    let sources = covered_patterns(host, size_bound);
    let reports: Vec<Option<IsominimalReport>> = sources.par_iter().map(|p| isominimal(p, host)).collect();
    let mut patterns: Vec<Pattern> = Vec::new();
    let mut seen: HashSet<Vec<OrdinalTerm>> = HashSet::new();
    let mut witness = BTreeMap::new();
    for r in reports.into_iter().flatten() {
        let universe = r.realization.universe().to_vec();
        if !seen.insert(universe.clone()) {
            continue;
        }
        for t in &universe {
            witness.entry(t.clone()).or_insert(patterns.len());
        }
        patterns.push(r.realization);
    }
    Core {
        host: hierarchy_digest(host),
        size_bound,
        members: witness.keys().cloned().collect(),
        patterns,
        witness,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialSegmentEmbedding {
    /// `i`-th member of the first core to the `i`-th of the second.
    pub map: Vec<(OrdinalTerm, OrdinalTerm)>,
    /// The image is downward closed and carries every realization of the
    /// first core onto an isomorphic substructure of the second host.
    pub initial_segment_flag: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreMismatch {
    pub position: usize,
    pub left: Option<Pattern>,
    pub right: Option<Pattern>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreComparison {
    Embedding(InitialSegmentEmbedding),
    Mismatch(CoreMismatch),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cores use different size bounds ({0} vs {1})")]
pub struct SizeBoundMismatch(pub usize, pub usize);

/// Matches members position by position. `host2` is consulted to check
/// that realizations of `c1` map onto isomorphic substructures; without it
/// only the position-wise witness types are compared.
pub fn compare_cores(c1: &Core, c2: &Core, host2: Option<&Hierarchy>) -> Result<CoreComparison, SizeBoundMismatch> {
    if c1.size_bound != c2.size_bound {
        return Err(SizeBoundMismatch(c1.size_bound, c2.size_bound));
    }
    for (i, a) in c1.members.iter().enumerate() {
        let left = c1.witness_pattern(a).cloned();
        let Some(b) = c2.members.get(i) else {
            return Ok(CoreComparison::Mismatch(CoreMismatch {
                position: i,
                left,
                right: None,
            }));
        };
        let right = c2.witness_pattern(b).cloned();
        let same = match (&left, &right) {
            (Some(p), Some(q)) => find_isomorphism(p, q).is_some(),
            _ => false,
        };
        if !same {
            return Ok(CoreComparison::Mismatch(CoreMismatch { position: i, left, right }));
        }
    }
    let map: Vec<(OrdinalTerm, OrdinalTerm)> = c1.members.iter().cloned().zip(c2.members.iter().cloned()).collect();
    let f: BTreeMap<&OrdinalTerm, &OrdinalTerm> = map.iter().map(|(a, b)| (a, b)).collect();
    let carried = c1.patterns.iter().all(|p| {
        let Some(host2) = host2 else { return true };
        let image: Option<Vec<usize>> = p.universe().iter().map(|t| host2.index_of(f[t])).collect();
        match image {
            Some(image) => {
                let q = host2.substructure(&image);
                crate::ordinal::first_missing(&q.universe().iter().cloned().collect()).is_none()
                    && find_isomorphism(p, &q).is_some()
            }
            None => false,
        }
    });
    Ok(CoreComparison::Embedding(InitialSegmentEmbedding {
        map,
        initial_segment_flag: carried,
    }))
}

/// Result of testing a structure for being a pattern realized in a hierarchy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternDecision {
    Invalid(Vec<Violation>),
    NotCovered(String),
    Covered(Covering),
}

impl PatternDecision {
    pub fn holds(&self) -> bool {
        matches!(self, PatternDecision::Covered(_))
    }

    pub fn reason(&self) -> String {
        match self {
            PatternDecision::Invalid(v) => format!(
                "invalid structure: {}",
                v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
            ),
            PatternDecision::NotCovered(why) => format!("valid but not covered: {why}"),
            PatternDecision::Covered(_) => "covered".to_string(),
        }
    }
}

pub fn is_pattern(s: &Structure, host: &Hierarchy) -> PatternDecision {
    let p = match Pattern::new(s) {
        Ok(p) => p,
        Err(_) => return PatternDecision::Invalid(validate_pattern(s)),
    };
    if let Some(c) = first_covering(&p, host, &Constraints::default()) {
        return PatternDecision::Covered(c);
    }
    for (a, b) in p.strict_pairs(2) {
        if let Some(d) = [&a, &b].into_iter().find(|x| !x.is_indecomposable()) {
            return PatternDecision::NotCovered(format!(
                "strict le2 pair ({a}, {b}) has decomposable end {d}; both ends of a strict le2 pair must be indecomposable"
            ));
        }
    }
    for (a, b) in p.strict_pairs(1) {
        if !a.is_indecomposable() {
            return PatternDecision::NotCovered(format!(
                "strict le1 pair ({a}, {b}) has decomposable left end; it must be indecomposable"
            ));
        }
    }
    PatternDecision::NotCovered("no covering exists in the carrier".to_string())
}

/// A longest chain `x0 < x1 < ...` with every consecutive pair a strict
/// `le2` pair, lexicographically least among the longest. Empty when no
/// strict pair exists.
pub fn longest_chain2(host: &Hierarchy) -> Vec<OrdinalTerm> {
    let n = host.terms().len();
    let le2 = host.relation(2);
    // from[i] = length of the longest chain starting at i
    let mut from = vec![1usize; n];
    for i in (0..n).rev() {
        for j in i + 1..n {
            if le2.get(i, j) {
                from[i] = from[i].max(from[j] + 1);
            }
        }
    }
    let best = from.iter().copied().max().unwrap_or(0);
    if best < 2 {
        return Vec::new();
    }
    let mut chain = Vec::with_capacity(best);
    let mut cur = (0..n).find(|&i| from[i] == best).unwrap();
    chain.push(cur);
    while from[cur] > 1 {
        cur = (cur + 1..n).find(|&j| le2.get(cur, j) && from[j] == from[cur] - 1).unwrap();
        chain.push(cur);
    }
    chain.into_iter().map(|i| host.terms()[i].clone()).collect()
}
