//! Finite structures over ordinal terms with two extra orders `le1 ⊇ le2`.
//!
//! The base order `le0` is never stored: it is the term order on the
//! universe. A [`Structure`] is raw input that may violate anything; a
//! [`Pattern`] is a structure that passed [`validate_pattern`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ordinal::{first_missing, induced_embedding, ClosedSet, OrdinalTerm};
use crate::relation::Relation;

pub type Pair = (OrdinalTerm, OrdinalTerm);

/// Candidate structure: any finite universe and any pair sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Structure {
    pub universe: BTreeSet<OrdinalTerm>,
    pub le1: BTreeSet<Pair>,
    pub le2: BTreeSet<Pair>,
}

impl Structure {
    /// Adds `(a, a)` to both relations for every `a` in the universe.
    pub fn with_reflexive(mut self) -> Self {
        for a in &self.universe {
            self.le1.insert((a.clone(), a.clone()));
            self.le2.insert((a.clone(), a.clone()));
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    MissingZero,
    NotClosed { missing: OrdinalTerm },
    PairOutsideUniverse { k: u8, a: OrdinalTerm, b: OrdinalTerm },
    NotReflexive { k: u8, a: OrdinalTerm },
    NotAntisymmetric { k: u8, a: OrdinalTerm, b: OrdinalTerm },
    NotTransitive { k: u8, a: OrdinalTerm, b: OrdinalTerm, c: OrdinalTerm },
    Le1NotInLe0 { a: OrdinalTerm, b: OrdinalTerm },
    Le2NotInLe1 { a: OrdinalTerm, b: OrdinalTerm },
    /// `a ≤_{k-1} b ≤_{k-1} c` and `a ≤_k c` but not `a ≤_k b`.
    Respect { k: u8, a: OrdinalTerm, b: OrdinalTerm, c: OrdinalTerm },
}

impl Violation {
    /// Short clause name, stable for reports.
    pub fn clause(&self) -> &'static str {
        match self {
            Violation::MissingZero | Violation::NotClosed { .. } => "closed",
            Violation::PairOutsideUniverse { .. } => "universe",
            Violation::NotReflexive { .. }
            | Violation::NotAntisymmetric { .. }
            | Violation::NotTransitive { .. }
            | Violation::Le1NotInLe0 { .. }
            | Violation::Le2NotInLe1 { .. } => "b",
            Violation::Respect { .. } => "c",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingZero => write!(f, "universe lacks 0"),
            Violation::NotClosed { missing } => {
                write!(f, "universe not closed: missing {missing}")
            }
            Violation::PairOutsideUniverse { k, a, b } => {
                write!(f, "le{k} pair ({a}, {b}) outside universe")
            }
            Violation::NotReflexive { k, a } => write!(f, "le{k} not reflexive at {a}"),
            Violation::NotAntisymmetric { k, a, b } => {
                write!(f, "le{k} not antisymmetric at ({a}, {b})")
            }
            Violation::NotTransitive { k, a, b, c } => {
                write!(f, "le{k} not transitive at ({a}, {b}, {c})")
            }
            Violation::Le1NotInLe0 { a, b } => write!(f, "le1 ⊄ le0 at ({a}, {b})"),
            Violation::Le2NotInLe1 { a, b } => write!(f, "le2 ⊄ le1 at ({a}, {b})"),
            Violation::Respect { k, a, b, c } => write!(
                f,
                "le{k} does not respect le{} at ({a}, {b}, {c})",
                k - 1
            ),
        }
    }
}

/// Every violated clause, each with a minimal witness. Empty means valid.
pub fn validate_pattern(s: &Structure) -> Vec<Violation> {
    let mut out = Vec::new();
    if !s.universe.contains(&OrdinalTerm::zero()) {
        out.push(Violation::MissingZero);
    } else if let Some(missing) = first_missing(&s.universe) {
        out.push(Violation::NotClosed { missing });
    }

    let u: Vec<&OrdinalTerm> = s.universe.iter().collect();
    let n = u.len();
    let index: BTreeMap<&OrdinalTerm, usize> = u.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let mut rels = [Relation::empty(n), Relation::empty(n)];
    for (k, pairs) in [(1u8, &s.le1), (2u8, &s.le2)] {
        for (a, b) in pairs {
            match (index.get(a), index.get(b)) {
                (Some(&i), Some(&j)) => rels[k as usize - 1].set(i, j, true),
                _ => out.push(Violation::PairOutsideUniverse {
                    k,
                    a: a.clone(),
                    b: b.clone(),
                }),
            }
        }
    }
    let le0 = Relation::upper(n);
    let name = |i: usize| u[i].clone();

    for (k, r) in [(1u8, &rels[0]), (2u8, &rels[1])] {
        for i in 0..n {
            if !r.get(i, i) {
                out.push(Violation::NotReflexive { k, a: name(i) });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if r.get(i, j) && r.get(j, i) {
                    out.push(Violation::NotAntisymmetric { k, a: name(i), b: name(j) });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !r.get(i, j) || i == j {
                    continue;
                }
                for l in 0..n {
                    if l != j && r.get(j, l) && !r.get(i, l) {
                        out.push(Violation::NotTransitive {
                            k,
                            a: name(i),
                            b: name(j),
                            c: name(l),
                        });
                    }
                }
            }
        }
    }
    for (i, j) in rels[0].strict_pairs() {
        if !le0.get(i, j) {
            out.push(Violation::Le1NotInLe0 { a: name(i), b: name(j) });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if rels[1].get(i, j) && !rels[0].get(i, j) {
                out.push(Violation::Le2NotInLe1 { a: name(i), b: name(j) });
            }
        }
    }
    let lower = [&le0, &rels[0]];
    for k in 1u8..=2 {
        let below = lower[k as usize - 1];
        let r = &rels[k as usize - 1];
        for a in 0..n {
            for c in 0..n {
                if a == c || !r.get(a, c) {
                    continue;
                }
                for b in 0..n {
                    if b != a && b != c && below.get(a, b) && below.get(b, c) && !r.get(a, b) {
                        out.push(Violation::Respect {
                            k,
                            a: name(a),
                            b: name(b),
                            c: name(c),
                        });
                    }
                }
            }
        }
    }
    out
}

/// A validated finite structure over a closed universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    universe: Vec<OrdinalTerm>,
    le1: Relation,
    le2: Relation,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("sets have different cardinalities ({0} vs {1})")]
pub struct CardinalityMismatch(pub usize, pub usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("patterns do not share a universe")]
pub struct UniverseMismatch;

impl Pattern {
    pub fn new(s: &Structure) -> Result<Pattern, Vec<Violation>> {
        let violations = validate_pattern(s);
        if !violations.is_empty() {
            return Err(violations);
        }
        let universe: Vec<OrdinalTerm> = s.universe.iter().cloned().collect();
        let n = universe.len();
        let pos = |t: &OrdinalTerm| universe.binary_search(t).unwrap();
        let mut le1 = Relation::empty(n);
        let mut le2 = Relation::empty(n);
        for (a, b) in &s.le1 {
            le1.set(pos(a), pos(b), true);
        }
        for (a, b) in &s.le2 {
            le2.set(pos(a), pos(b), true);
        }
        Ok(Pattern { universe, le1, le2 })
    }

    /// The pattern on `universe` with no strict `le1`/`le2` pairs.
    pub fn discrete(universe: &ClosedSet) -> Pattern {
        let n = universe.len();
        Pattern {
            universe: universe.to_vec(),
            le1: Relation::identity(n),
            le2: Relation::identity(n),
        }
    }

    /// Caller guarantees the result is valid: `universe` ascending and
    /// closed, relations satisfying every pattern clause.
    pub(crate) fn from_parts(universe: Vec<OrdinalTerm>, le1: Relation, le2: Relation) -> Pattern {
        debug_assert!(validate_pattern(
            &Pattern {
                universe: universe.clone(),
                le1: le1.clone(),
                le2: le2.clone()
            }
            .to_structure()
        )
        .is_empty());
        Pattern { universe, le1, le2 }
    }

    /// Like [`Pattern::from_parts`] without the check, for reporting the
    /// violations of a rejected construction.
    pub(crate) fn from_parts_unchecked(universe: Vec<OrdinalTerm>, le1: Relation, le2: Relation) -> Pattern {
        Pattern { universe, le1, le2 }
    }

    pub fn universe(&self) -> &[OrdinalTerm] {
        &self.universe
    }

    pub fn closed_set(&self) -> ClosedSet {
        ClosedSet::new(self.universe.iter().cloned().collect()).expect("pattern universes are closed")
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn position(&self, t: &OrdinalTerm) -> Option<usize> {
        self.universe.binary_search(t).ok()
    }

    pub fn relation(&self, k: u8) -> &Relation {
        match k {
            1 => &self.le1,
            2 => &self.le2,
            _ => panic!("no relation le{k}"),
        }
    }

    /// `i ≤_k j` on positions, `k ∈ {0, 1, 2}`.
    pub fn le(&self, k: u8, i: usize, j: usize) -> bool {
        match k {
            0 => i <= j,
            _ => self.relation(k).get(i, j),
        }
    }

    /// Positions of the indecomposable elements, ascending.
    pub fn indecomposable_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.universe[i].is_indecomposable()).collect()
    }

    /// Strict pairs of `le_k` as terms, ascending.
    pub fn strict_pairs(&self, k: u8) -> Vec<Pair> {
        self.relation(k)
            .strict_pairs()
            .map(|(i, j)| (self.universe[i].clone(), self.universe[j].clone()))
            .collect()
    }

    /// Restriction to the given ascending positions, which must form a
    /// closed set.
    pub fn restrict(&self, positions: &[usize]) -> Pattern {
        Pattern {
            universe: positions.iter().map(|&i| self.universe[i].clone()).collect(),
            le1: self.le1.restrict(positions),
            le2: self.le2.restrict(positions),
        }
    }

    pub fn to_structure(&self) -> Structure {
        let pairs = |r: &Relation| {
            (0..self.len())
                .flat_map(|i| (0..self.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| r.get(i, j))
                .map(|(i, j)| (self.universe[i].clone(), self.universe[j].clone()))
                .collect()
        };
        Structure {
            universe: self.universe.iter().cloned().collect(),
            le1: pairs(&self.le1),
            le2: pairs(&self.le2),
        }
    }
}

/// `|Q| ⊆ |P|` and `Q` carries exactly the restricted relations.
pub fn is_closed_substructure(q: &Pattern, p: &Pattern) -> bool {
    let Some(positions) = q
        .universe
        .iter()
        .map(|t| p.position(t))
        .collect::<Option<Vec<usize>>>()
    else {
        return false;
    };
    if first_missing(&q.universe.iter().cloned().collect()).is_some() {
        return false;
    }
    p.restrict(&positions) == *q
}

/// The isomorphism induced by matching indecomposables in increasing
/// order, if it is a bijection preserving `le1`/`le2` both ways.
pub fn find_isomorphism(p: &Pattern, q: &Pattern) -> Option<BTreeMap<OrdinalTerm, OrdinalTerm>> {
    if p.len() != q.len() {
        return None;
    }
    let pi: Vec<&OrdinalTerm> = p.universe.iter().filter(|t| t.is_indecomposable()).collect();
    let qi: Vec<&OrdinalTerm> = q.universe.iter().filter(|t| t.is_indecomposable()).collect();
    if pi.len() != qi.len() {
        return None;
    }
    let indec: BTreeMap<OrdinalTerm, OrdinalTerm> =
        pi.into_iter().cloned().zip(qi.into_iter().cloned()).collect();
    let map = induced_embedding(&indec, &p.closed_set()).ok()?;
    let image: Vec<usize> = p
        .universe
        .iter()
        .map(|t| q.position(&map[t]))
        .collect::<Option<_>>()?;
    // `image` is strictly increasing with p.len() == q.len(), hence the identity.
    for k in 1..=2 {
        for i in 0..p.len() {
            for j in 0..p.len() {
                if p.le(k, i, j) != q.le(k, image[i], image[j]) {
                    return None;
                }
            }
        }
    }
    Some(map)
}

/// Pointwise order on equal-size sets: the i-th smallest of `x` is at most
/// the i-th smallest of `y` for every i.
pub fn pointwise_le<T: Ord>(x: &BTreeSet<T>, y: &BTreeSet<T>) -> Result<bool, CardinalityMismatch> {
    if x.len() != y.len() {
        return Err(CardinalityMismatch(x.len(), y.len()));
    }
    Ok(x.iter().zip(y).all(|(a, b)| a <= b))
}

/// Clause check on index relations over an ascending universe: reflexive,
/// strict pairs ascending, transitive, `le2 ⊆ le1`, and both respect
/// conditions. Closedness of the universe is not checked.
pub(crate) fn relations_valid(le1: &Relation, le2: &Relation) -> bool {
    let n = le1.size();
    let le0 = Relation::upper(n);
    for r in [le1, le2] {
        if !(0..n).all(|i| r.get(i, i)) || !r.is_subset(&le0) {
            return false;
        }
        for (i, j) in r.strict_pairs() {
            if (j + 1..n).any(|l| r.get(j, l) && !r.get(i, l)) {
                return false;
            }
        }
    }
    if !le2.is_subset(le1) {
        return false;
    }
    for (r, below) in [(le1, &le0), (le2, le1)] {
        for (a, c) in r.strict_pairs() {
            if (a + 1..c).any(|b| below.get(a, b) && below.get(b, c) && !r.get(a, b)) {
                return false;
            }
        }
    }
    true
}

/// `s` has at least the relations of `t` on a shared universe.
pub fn covers(s: &Pattern, t: &Pattern) -> Result<bool, UniverseMismatch> {
    if s.universe != t.universe {
        return Err(UniverseMismatch);
    }
    Ok(t.le1.is_subset(&s.le1) && t.le2.is_subset(&s.le2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::closure;

    fn t(s: &str) -> OrdinalTerm {
        s.parse().unwrap()
    }

    fn structure(universe: &[&str], le1: &[(&str, &str)], le2: &[(&str, &str)]) -> Structure {
        let pairs = |ps: &[(&str, &str)]| ps.iter().map(|(a, b)| (t(a), t(b))).collect();
        Structure {
            universe: universe.iter().map(|s| t(s)).collect(),
            le1: pairs(le1),
            le2: pairs(le2),
        }
        .with_reflexive()
    }

    #[test]
    fn singleton_is_valid() {
        assert!(validate_pattern(&structure(&["0"], &[], &[])).is_empty());
    }

    #[test]
    fn le2_outside_le1_is_reported() {
        let mut s = structure(&["0", "1"], &[], &[]);
        s.le2.insert((t("0"), t("1")));
        let v = validate_pattern(&s);
        assert!(v.contains(&Violation::Le2NotInLe1 { a: t("0"), b: t("1") }), "{v:?}");
        assert!(v.iter().any(|x| x.to_string().contains("le2 ⊄ le1")));
    }

    #[test]
    fn respect_violation_reports_triple() {
        let s = structure(&["0", "1", "w"], &[("0", "w")], &[]);
        let v = validate_pattern(&s);
        assert_eq!(
            v,
            vec![Violation::Respect { k: 1, a: t("0"), b: t("1"), c: t("w") }]
        );
    }

    #[test]
    fn closedness_and_reflexivity_are_checked() {
        let s = structure(&["0", "w+1"], &[], &[]);
        assert_eq!(validate_pattern(&s), vec![Violation::NotClosed { missing: t("w") }]);
        let mut s = structure(&["0", "1"], &[], &[]);
        s.le1.remove(&(t("1"), t("1")));
        s.le2.remove(&(t("1"), t("1")));
        let v = validate_pattern(&s);
        assert!(v.contains(&Violation::NotReflexive { k: 1, a: t("1") }));
        let s = structure(&["0", "1"], &[("1", "0")], &[]);
        assert!(validate_pattern(&s).contains(&Violation::Le1NotInLe0 { a: t("1"), b: t("0") }));
    }

    #[test]
    fn closed_substructures() {
        let p = Pattern::new(&structure(&["0", "1", "w", "w+1"], &[("1", "w")], &[])).unwrap();
        assert!(is_closed_substructure(&p, &p));
        let zero = Pattern::discrete(&closure([]));
        assert!(is_closed_substructure(&zero, &p));
        let q = Pattern::new(&structure(&["0", "1", "w"], &[], &[])).unwrap();
        assert!(!is_closed_substructure(&q, &p), "relations must be restricted exactly");
        let q = Pattern::new(&structure(&["0", "1", "w"], &[("1", "w")], &[])).unwrap();
        assert!(is_closed_substructure(&q, &p));
        // {0, w+1} is not closed, so cannot even be a pattern; check the raw path
        let unclosed = Pattern {
            universe: vec![t("0"), t("w+1")],
            le1: Relation::identity(2),
            le2: Relation::identity(2),
        };
        assert!(!is_closed_substructure(&unclosed, &p));
    }

    #[test]
    fn isomorphism_examples() {
        let p = Pattern::new(&structure(&["0", "w"], &[], &[])).unwrap();
        let q = Pattern::new(&structure(&["0", "w^(2)"], &[], &[])).unwrap();
        let id = find_isomorphism(&p, &p).unwrap();
        assert!(id.iter().all(|(a, b)| a == b));
        let m = find_isomorphism(&p, &q).unwrap();
        assert_eq!(m[&t("w")], t("w^(2)"));
        assert_eq!(m[&t("0")], t("0"));

        let a = Pattern::new(&structure(&["0", "1", "w"], &[("1", "w")], &[])).unwrap();
        let b = Pattern::new(&structure(&["0", "1", "w"], &[], &[])).unwrap();
        assert!(find_isomorphism(&a, &b).is_none());

        let c = Pattern::new(&structure(&["0", "1", "2"], &[], &[])).unwrap();
        assert!(find_isomorphism(&b, &c).is_none(), "indecomposable counts differ");
    }

    #[test]
    fn pointwise_examples() {
        let s = |xs: &[&str]| xs.iter().map(|x| t(x)).collect::<BTreeSet<_>>();
        assert_eq!(pointwise_le(&s(&["1", "w"]), &s(&["1", "w^(2)"])), Ok(true));
        assert_eq!(pointwise_le(&s(&["1", "w"]), &s(&["1", "w"])), Ok(true));
        assert_eq!(pointwise_le(&s(&["w"]), &s(&["1"])), Ok(false));
        assert_eq!(pointwise_le(&s(&["w"]), &s(&["1", "w"])), Err(CardinalityMismatch(1, 2)));
    }

    #[test]
    fn covers_examples() {
        let base = Pattern::new(&structure(&["0", "1", "w", "w^(2)"], &[("w", "w^(2)")], &[("w", "w^(2)")])).unwrap();
        assert_eq!(covers(&base, &base), Ok(true));
        let more = Pattern::new(&structure(
            &["0", "1", "w", "w^(2)"],
            &[("w", "w^(2)"), ("1", "w"), ("1", "w^(2)")],
            &[("w", "w^(2)")],
        ))
        .unwrap();
        assert_eq!(covers(&more, &base), Ok(true));
        let less = Pattern::new(&structure(&["0", "1", "w", "w^(2)"], &[("w", "w^(2)")], &[])).unwrap();
        assert_eq!(covers(&less, &base), Ok(false));
        assert_eq!(covers(&less, &Pattern::discrete(&closure([]))), Err(UniverseMismatch));
    }
}
