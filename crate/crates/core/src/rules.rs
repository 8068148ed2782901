//! Rule instances `P | P⁺` fed to the cofinal-validity tester.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ordinal::{closure, OrdinalTerm};
use crate::pattern::{is_closed_substructure, relations_valid, validate_pattern, Pattern, Violation};
use crate::relation::Relation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleKind {
    ArithExt,
    Reflect1Down,
    Reflect2Up,
    Generic,
}

impl RuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::ArithExt => "arith_ext",
            RuleKind::Reflect1Down => "reflect1_down",
            RuleKind::Reflect2Up => "reflect2_up",
            RuleKind::Generic => "generic",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [RuleKind::ArithExt, RuleKind::Reflect1Down, RuleKind::Reflect2Up, RuleKind::Generic]
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown rule kind {s:?}"))
    }
}

/// A premise that is a closed substructure of its conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    premise: Pattern,
    conclusion: Pattern,
    kind: RuleKind,
}

impl RuleInstance {
    pub fn premise(&self) -> &Pattern {
        &self.premise
    }

    pub fn conclusion(&self) -> &Pattern {
        &self.conclusion
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("premise is not a closed substructure of the conclusion")]
    NotSubstructure,
    #[error("extension introduces new indecomposable {0}")]
    NewIndecomposable(OrdinalTerm),
    #[error("{0} is not in the premise")]
    NotInUniverse(OrdinalTerm),
    #[error("{0} is not indecomposable")]
    NotIndecomposable(OrdinalTerm),
    #[error("({0}, {1}) is not a strict le1 pair of the premise")]
    NotStrictLe1(OrdinalTerm, OrdinalTerm),
    #[error("{0} is not between the elements below {1} and {2}")]
    OutOfRange(OrdinalTerm, OrdinalTerm, OrdinalTerm),
    #[error("no room for {needed} fresh indecomposables between {low} and {high}")]
    NoRoom { needed: usize, low: OrdinalTerm, high: OrdinalTerm },
    #[error("constructed conclusion is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// Adds the pairs forced by transitivity and respect until nothing changes.
fn close_forced(le1: &mut Relation, le2: &mut Relation) {
    let n = le1.size();
    loop {
        let mut changed = false;
        let mut add = |r: &mut Relation, i: usize, j: usize| {
            if !r.get(i, j) {
                r.set(i, j, true);
                changed = true;
            }
        };
        for r in [&mut *le1, &mut *le2] {
            for i in 0..n {
                for j in i + 1..n {
                    if r.get(i, j) {
                        for l in j + 1..n {
                            if r.get(j, l) {
                                add(r, i, l);
                            }
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for c in a + 1..n {
                if le1.get(a, c) {
                    for b in a + 1..c {
                        add(le1, a, b);
                    }
                }
                if le2.get(a, c) {
                    for b in a + 1..c {
                        if le1.get(a, b) && le1.get(b, c) {
                            add(le2, a, b);
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Conclusion on `universe` carrying `pairs` (position pairs into
/// `universe`) plus whatever they force.
fn finish(premise: &Pattern, universe: Vec<OrdinalTerm>, pairs: [Vec<(usize, usize)>; 2], kind: RuleKind) -> Result<RuleInstance, RuleError> {
    let n = universe.len();
    let mut le1 = Relation::identity(n);
    let mut le2 = Relation::identity(n);
    for &(i, j) in &pairs[0] {
        le1.set(i, j, true);
    }
    for &(i, j) in &pairs[1] {
        le2.set(i, j, true);
    }
    close_forced(&mut le1, &mut le2);
    if !relations_valid(&le1, &le2) {
        let raw = Pattern::from_parts_unchecked(universe, le1, le2);
        return Err(RuleError::Invalid(validate_pattern(&raw.to_structure())));
    }
    let conclusion = Pattern::from_parts(universe, le1, le2);
    if !is_closed_substructure(premise, &conclusion) {
        return Err(RuleError::NotSubstructure);
    }
    Ok(RuleInstance {
        premise: premise.clone(),
        conclusion,
        kind,
    })
}

/// Premise pairs re-indexed into `universe`.
fn carried_pairs(p: &Pattern, universe: &[OrdinalTerm]) -> [Vec<(usize, usize)>; 2] {
    let pos = |t: &OrdinalTerm| universe.binary_search(t).expect("premise inside conclusion");
    [1u8, 2].map(|k| p.strict_pairs(k).iter().map(|(a, b)| (pos(a), pos(b))).collect())
}

/// Extends `p` by the closure of `new_terms`, which may not bring new
/// indecomposables, adding only the pairs validity forces.
pub fn make_arith_ext(p: &Pattern, new_terms: &BTreeSet<OrdinalTerm>) -> Result<RuleInstance, RuleError> {
    let universe = closure(p.universe().iter().chain(new_terms)).to_vec();
    if let Some(t) = universe.iter().find(|t| t.is_indecomposable() && p.position(t).is_none()) {
        return Err(RuleError::NewIndecomposable(t.clone()));
    }
    let pairs = carried_pairs(p, &universe);
    finish(p, universe, pairs, RuleKind::ArithExt)
}

/// Adds an order-isomorphic copy of `x` placed between the premise elements
/// below `a` and `a` itself. Indecomposable summands of `x` at or above `a`
/// are replaced by fresh indecomposables `ω^(e+1), ω^(e+2), ...` where `ω^e`
/// leads the largest premise element below `a`; summands below `a` stay.
/// Pairs from elements below `a` into `x`, and within `x`, are copied.
pub fn make_reflect1_down(
    p: &Pattern,
    a: &OrdinalTerm,
    b: &OrdinalTerm,
    x: &BTreeSet<OrdinalTerm>,
) -> Result<RuleInstance, RuleError> {
    let (Some(ia), Some(ib)) = (p.position(a), p.position(b)) else {
        let missing = if p.position(a).is_none() { a } else { b };
        return Err(RuleError::NotInUniverse(missing.clone()));
    };
    if ia >= ib || !p.le(1, ia, ib) {
        return Err(RuleError::NotStrictLe1(a.clone(), b.clone()));
    }
    if !a.is_indecomposable() {
        return Err(RuleError::NotIndecomposable(a.clone()));
    }
    for t in x {
        if p.position(t).is_none() {
            return Err(RuleError::NotInUniverse(t.clone()));
        }
        if t < a || t > b {
            return Err(RuleError::OutOfRange(t.clone(), a.clone(), b.clone()));
        }
    }
    if x.is_empty() {
        return make_generic(p, p).map(|r| RuleInstance {
            kind: RuleKind::Reflect1Down,
            ..r
        });
    }

    let below: Vec<&OrdinalTerm> = p.universe()[..ia].iter().collect();
    let low = below.last().copied().cloned().unwrap_or_else(OrdinalTerm::zero);
    let moved: BTreeSet<OrdinalTerm> = x.iter().flat_map(|t| t.summands()).filter(|s| s >= a).collect();
    let base = if low.is_zero() { None } else { Some(low.exponents()[0].clone()) };
    let a_exp = &a.exponents()[0];
    let mut fresh = BTreeMap::new();
    for (k, g) in moved.iter().enumerate() {
        let e = match &base {
            None => OrdinalTerm::natural(k),
            Some(e) => e.add(&OrdinalTerm::natural(k + 1)),
        };
        if &e >= a_exp {
            return Err(RuleError::NoRoom {
                needed: moved.len(),
                low,
                high: a.clone(),
            });
        }
        fresh.insert(g.clone(), OrdinalTerm::omega_pow(e));
    }
    let copy = |t: &OrdinalTerm| -> OrdinalTerm {
        let exps = t
            .summands()
            .map(|s| fresh.get(&s).cloned().unwrap_or(s))
            .flat_map(|s| s.exponents().to_vec())
            .collect();
        OrdinalTerm::from_exponents(exps).expect("images stay in normal form")
    };
    let sigma: BTreeMap<OrdinalTerm, OrdinalTerm> = below
        .iter()
        .map(|t| ((*t).clone(), (*t).clone()))
        .chain(x.iter().map(|t| (t.clone(), copy(t))))
        .collect();

    let universe = closure(p.universe().iter().chain(sigma.values())).to_vec();
    let pos = |t: &OrdinalTerm| universe.binary_search(t).unwrap();
    let mut pairs = carried_pairs(p, &universe);
    for (k, out) in pairs.iter_mut().enumerate() {
        for (u, v) in p.strict_pairs(k as u8 + 1) {
            if let (Some(su), Some(sv)) = (sigma.get(&u), sigma.get(&v)) {
                if x.contains(&v) {
                    out.push((pos(su), pos(sv)));
                }
            }
        }
    }
    finish(p, universe, pairs, RuleKind::Reflect1Down)
}

pub fn make_generic(p: &Pattern, pplus: &Pattern) -> Result<RuleInstance, RuleError> {
    if !is_closed_substructure(p, pplus) {
        return Err(RuleError::NotSubstructure);
    }
    Ok(RuleInstance {
        premise: p.clone(),
        conclusion: pplus.clone(),
        kind: RuleKind::Generic,
    })
}

/// Wraps a stored pair under a recorded kind after the invariant check.
pub fn make_with_kind(p: &Pattern, pplus: &Pattern, kind: RuleKind) -> Result<RuleInstance, RuleError> {
    make_generic(p, pplus).map(|r| RuleInstance { kind, ..r })
}
