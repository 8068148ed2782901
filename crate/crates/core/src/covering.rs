//! Coverings of patterns in hierarchies, extensions above regressive
//! bounds, and budgeted testing of cofinal validity for rules `P | P⁺`.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use thiserror::Error;

use crate::embed::{Search, Shape, Slot};
use crate::hierarchy::Hierarchy;
use crate::ordinal::{first_missing, induced_embedding, OrdinalTerm};
use crate::pattern::{is_closed_substructure, Pattern};

/// A relation-preserving arithmetic embedding of a pattern into a hierarchy.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Covering {
    source: Pattern,
    assignment: BTreeMap<OrdinalTerm, OrdinalTerm>,
}

impl Covering {
    /// Wraps an assignment after checking it with [`is_covering`].
    pub fn new(source: Pattern, assignment: BTreeMap<OrdinalTerm, OrdinalTerm>, host: &Hierarchy) -> Option<Covering> {
        is_covering(&assignment, &source, host).then_some(Covering { source, assignment })
    }

    pub fn source(&self) -> &Pattern {
        &self.source
    }

    pub fn assignment(&self) -> &BTreeMap<OrdinalTerm, OrdinalTerm> {
        &self.assignment
    }

    pub fn image(&self, t: &OrdinalTerm) -> Option<&OrdinalTerm> {
        self.assignment.get(t)
    }

    pub fn range(&self) -> BTreeSet<OrdinalTerm> {
        self.assignment.values().cloned().collect()
    }
}

/// Bounds `φ(ξ) < ξ` on indecomposable elements of a covering's range.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RegressiveMap {
    bounds: BTreeMap<OrdinalTerm, OrdinalTerm>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegressiveError {
    #[error("{0} is not indecomposable")]
    NotIndecomposable(OrdinalTerm),
    #[error("bound {bound} is not below {point}")]
    NotRegressive { point: OrdinalTerm, bound: OrdinalTerm },
}

impl RegressiveMap {
    pub fn new(bounds: BTreeMap<OrdinalTerm, OrdinalTerm>) -> Result<Self, RegressiveError> {
        for (xi, b) in &bounds {
            if !xi.is_indecomposable() {
                return Err(RegressiveError::NotIndecomposable(xi.clone()));
            }
            if b >= xi {
                return Err(RegressiveError::NotRegressive {
                    point: xi.clone(),
                    bound: b.clone(),
                });
            }
        }
        Ok(RegressiveMap { bounds })
    }

    /// The pointwise largest regressive map on the indecomposables of `h`'s
    /// range: each maps to its carrier predecessor.
    pub fn maximal(h: &Covering, host: &Hierarchy) -> RegressiveMap {
        let bounds = h
            .range()
            .into_iter()
            .filter(|xi| xi.is_indecomposable())
            .filter_map(|xi| {
                let i = host.index_of(&xi)?;
                (i > 0).then(|| (xi, host.terms()[i - 1].clone()))
            })
            .collect();
        RegressiveMap { bounds }
    }

    pub fn bound(&self, xi: &OrdinalTerm) -> Option<&OrdinalTerm> {
        self.bounds.get(xi)
    }

    pub fn bounds(&self) -> &BTreeMap<OrdinalTerm, OrdinalTerm> {
        &self.bounds
    }

    /// Every regressive map into the carrier on the range indecomposables
    /// of `h`, in odometer order.
    pub fn all(h: &Covering, host: &Hierarchy) -> impl Iterator<Item = RegressiveMap> {
        let points: Vec<(OrdinalTerm, usize)> = h
            .range()
            .into_iter()
            .filter(|xi| xi.is_indecomposable())
            .filter_map(|xi| host.index_of(&xi).map(|i| (xi, i)))
            .filter(|(_, i)| *i > 0)
            .collect();
        let terms = host.terms().to_vec();
        let mut digits = vec![0usize; points.len()];
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = RegressiveMap {
                bounds: points
                    .iter()
                    .zip(&digits)
                    .map(|((xi, _), &d)| (xi.clone(), terms[d].clone()))
                    .collect(),
            };
            done = true;
            for (d, (_, limit)) in digits.iter_mut().zip(&points) {
                if *d + 1 < *limit {
                    *d += 1;
                    done = false;
                    break;
                }
                *d = 0;
            }
            Some(out)
        })
    }
}

/// Checks every covering requirement directly on terms: the assignment is
/// total on `|P|` into the carrier, is the arithmetic extension of its
/// values on indecomposables, is strictly increasing, has closed range, and
/// carries `le1`/`le2` pairs forward.
pub fn is_covering(assignment: &BTreeMap<OrdinalTerm, OrdinalTerm>, p: &Pattern, host: &Hierarchy) -> bool {
    if assignment.len() != p.len() || !p.universe().iter().all(|t| assignment.contains_key(t)) {
        return false;
    }
    let Some(img) = p
        .universe()
        .iter()
        .map(|t| host.index_of(&assignment[t]))
        .collect::<Option<Vec<usize>>>()
    else {
        return false;
    };
    let indec: BTreeMap<OrdinalTerm, OrdinalTerm> = assignment
        .iter()
        .filter(|(a, _)| a.is_indecomposable())
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect();
    match induced_embedding(&indec, &p.closed_set()) {
        Ok(m) if m == *assignment => {}
        _ => return false,
    }
    if first_missing(&assignment.values().cloned().collect()).is_some() {
        return false;
    }
    if img.windows(2).any(|w| w[0] >= w[1]) {
        return false;
    }
    for k in 1..=2u8 {
        for (i, j) in p.relation(k).strict_pairs() {
            if !host.le(k, img[i], img[j]) {
                return false;
            }
        }
    }
    true
}

/// Optional restrictions on a covering search, keyed by indecomposables of
/// the source pattern.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Constraints {
    /// Prescribed images.
    pub fixed: BTreeMap<OrdinalTerm, OrdinalTerm>,
    /// Images must lie strictly above these terms.
    pub above: BTreeMap<OrdinalTerm, OrdinalTerm>,
}

fn pattern_shape(p: &Pattern) -> Shape {
    Shape::from_terms(
        p.universe(),
        p.relation(1).strict_pairs().collect(),
        p.relation(2).strict_pairs().collect(),
    )
}

/// Visits the carrier-index images of every covering of `p` satisfying
/// `c`, in lexicographic order of the indecomposable images.
pub(crate) fn visit_coverings(
    p: &Pattern,
    host: &Hierarchy,
    c: &Constraints,
    visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let shape = pattern_shape(p);
    let terms = host.terms();
    let mut slots = Vec::with_capacity(shape.n_indec());
    for a in p.universe().iter().filter(|t| t.is_indecomposable()) {
        if let Some(target) = c.fixed.get(a) {
            match host.index_of(target) {
                Some(i) => slots.push(Slot::Fixed(i)),
                None => return ControlFlow::Continue(()),
            }
            continue;
        }
        let above = c.above.get(a).and_then(|bound| terms.partition_point(|x| x <= bound).checked_sub(1));
        slots.push(Slot::Free { above, below: None });
    }
    Search::new(&shape, host.carrier(), host.relation(1), host.relation(2), slots).run(&mut |_, el| visit(el))
}

fn to_covering(p: &Pattern, host: &Hierarchy, images: &[usize]) -> Covering {
    Covering {
        source: p.clone(),
        assignment: p
            .universe()
            .iter()
            .cloned()
            .zip(images.iter().map(|&i| host.terms()[i].clone()))
            .collect(),
    }
}

/// All coverings of `p` in `host` satisfying `c`, lexicographic in the
/// images of the indecomposables.
pub fn search_coverings(p: &Pattern, host: &Hierarchy, c: &Constraints) -> Vec<Covering> {
    let mut out = Vec::new();
    let _ = visit_coverings(p, host, c, &mut |el| {
        out.push(to_covering(p, host, el));
        ControlFlow::Continue(())
    });
    out
}

pub fn first_covering(p: &Pattern, host: &Hierarchy, c: &Constraints) -> Option<Covering> {
    let mut out = None;
    let _ = visit_coverings(p, host, c, &mut |el| {
        out = Some(to_covering(p, host, el));
        ControlFlow::Break(())
    });
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtendError {
    #[error("premise is not a closed substructure of the conclusion")]
    NotSubstructure,
    #[error("covering is not a covering of the premise")]
    CoveringMismatch,
    #[error("extension does not agree with the covering it extends")]
    Disagrees,
}

/// For each new indecomposable `b` of `P⁺`, the indecomposables `a` of `P`
/// with `(-∞, a)^P < b < a`.
fn gap_owners(p: &Pattern, pplus: &Pattern) -> Vec<(OrdinalTerm, Vec<OrdinalTerm>)> {
    let old: BTreeSet<&OrdinalTerm> = p.universe().iter().collect();
    pplus
        .universe()
        .iter()
        .filter(|b| b.is_indecomposable() && !old.contains(b))
        .map(|b| {
            let owners = p
                .universe()
                .iter()
                .filter(|a| a.is_indecomposable() && *a > b)
                .filter(|a| old.range::<OrdinalTerm, _>(..*a).all(|x| *x < b))
                .cloned()
                .collect();
            (b.clone(), owners)
        })
        .collect()
}

/// Whether `hplus` extends `h` and puts every new indecomposable above the
/// `φ`-bound of the old indecomposable it sits immediately below.
pub fn extends_above(hplus: &Covering, h: &Covering, phi: &RegressiveMap) -> Result<bool, ExtendError> {
    if !is_closed_substructure(&h.source, &hplus.source) {
        return Err(ExtendError::NotSubstructure);
    }
    if h.assignment.iter().any(|(a, img)| hplus.assignment.get(a) != Some(img)) {
        return Err(ExtendError::Disagrees);
    }
    for (b, owners) in gap_owners(&h.source, &hplus.source) {
        let img_b = &hplus.assignment[&b];
        for a in owners {
            if let Some(bound) = phi.bound(&h.assignment[&a]) {
                if bound >= img_b {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A covering of `pplus` extending `h` above `phi`, the lexicographically
/// first one found in the carrier.
pub fn extend_covering(
    p: &Pattern,
    pplus: &Pattern,
    h: &Covering,
    phi: &RegressiveMap,
    host: &Hierarchy,
) -> Result<Option<Covering>, ExtendError> {
    if !is_closed_substructure(p, pplus) {
        return Err(ExtendError::NotSubstructure);
    }
    if h.source != *p {
        return Err(ExtendError::CoveringMismatch);
    }
    let mut c = Constraints::default();
    for a in p.universe().iter().filter(|t| t.is_indecomposable()) {
        c.fixed.insert(a.clone(), h.assignment[a].clone());
    }
    for (b, owners) in gap_owners(p, pplus) {
        let bound = owners.iter().filter_map(|a| phi.bound(&h.assignment[a])).max();
        if let Some(bound) = bound {
            c.above.insert(b, bound.clone());
        }
    }
    Ok(first_covering(pplus, host, &c))
}

/// Enumeration caps for [`test_cofinal_validity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_coverings: usize,
    /// Regressive maps tried per covering, the pointwise-maximal one included.
    pub max_phis: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_coverings: 10_000,
            max_phis: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    ValidOnSample { coverings: usize, phis: usize },
    Counterexample { covering: Covering, phi: RegressiveMap },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::ValidOnSample { .. })
    }
}

/// Tries to extend every covering of `p` (up to the budget) above the
/// pointwise-maximal regressive map, plus further maps up to the budget.
/// An extension above the maximal map is one above every map, so the
/// further maps only cross-check.
pub fn test_cofinal_validity(p: &Pattern, pplus: &Pattern, host: &Hierarchy, budget: Budget) -> Result<Verdict, ExtendError> {
    if !is_closed_substructure(p, pplus) {
        return Err(ExtendError::NotSubstructure);
    }
    let mut coverings = 0;
    let mut phis = 0;
    let mut failure = None;
    let _ = visit_coverings(p, host, &Constraints::default(), &mut |el| {
        if coverings >= budget.max_coverings {
            return ControlFlow::Break(());
        }
        coverings += 1;
        let h = to_covering(p, host, el);
        let maximal = RegressiveMap::maximal(&h, host);
        let rest = RegressiveMap::all(&h, host).filter(|m| *m != maximal);
        for phi in std::iter::once(maximal.clone()).chain(rest).take(budget.max_phis.max(1)) {
            phis += 1;
            if extend_covering(p, pplus, &h, &phi, host).expect("checked above").is_none() {
                failure = Some((h, phi));
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    Ok(match failure {
        Some((covering, phi)) => Verdict::Counterexample { covering, phi },
        None => Verdict::ValidOnSample { coverings, phis },
    })
}
