//! Finite hierarchies: `le1`/`le2` on a closed carrier computed as the
//! fixed point of elementarity games.
//!
//! For a candidate pair `α < β` the spoiler picks up to `moves` carrier
//! elements in `[α, β)`; `X` is their closure. The duplicator must answer
//! with an arithmetic embedding `h` of `X` into `[0, α)` that fixes
//! `X ∩ [0, α)` and carries the current `le1`/`le2` pairs of `X` forward.
//! That is the one-round (Σ₁) game. In the two-round (Σ₂) game the
//! duplicator must pick `h` so that, whatever `replies` elements `Y` of
//! `[0, α)` the spoiler adds, the closure `Z` of `h[X] ∪ Y` maps back into
//! `[0, β)` by an arithmetic embedding `g` with `g ∘ h = id` on `X`, again
//! preserving pairs forward.
//!
//! Relations start as the full order and lose every pair whose game is lost
//! against the previous round's relations. After the game step, structural
//! clauses restore inclusion, transitivity and respect. Iteration stops at
//! the first round that removes nothing.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use rayon::prelude::*;
use thiserror::Error;

use crate::carrier::Carrier;
use crate::embed::{Search, Shape, Slot};
use crate::ordinal::{first_missing, ClosedSet, OrdinalTerm};
use crate::pattern::{validate_pattern, Pattern, Structure, Violation};
use crate::relation::Relation;

/// Sizes of the spoiler's moves in the elementarity games.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GameBounds {
    /// Elements of `[α, β)` generating the first-round set.
    pub moves: usize,
    /// Elements of `[0, α)` added in the second round.
    pub replies: usize,
}

impl Default for GameBounds {
    fn default() -> Self {
        GameBounds { moves: 2, replies: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RoundLog {
    pub round: usize,
    pub pruned_le1: usize,
    pub pruned_le2: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BuildLog {
    pub rounds: Vec<RoundLog>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("carrier is not closed: missing {0}")]
    NotClosed(OrdinalTerm),
    #[error("top {0} is not indecomposable")]
    TopNotIndecomposable(OrdinalTerm),
    #[error("carrier element {element} is not below top {top}")]
    TopNotAbove { top: OrdinalTerm, element: OrdinalTerm },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("{0} is not in the carrier")]
    NotInCarrier(OrdinalTerm),
    #[error("{0} is above {1}")]
    NotOrdered(OrdinalTerm, OrdinalTerm),
    #[error("no relation le{0}")]
    BadLevel(u8),
}

#[derive(Clone, Debug)]
pub struct Hierarchy {
    carrier: Carrier,
    top: OrdinalTerm,
    bounds: GameBounds,
    le1: Relation,
    le2: Relation,
    log: BuildLog,
}

impl PartialEq for Hierarchy {
    fn eq(&self, other: &Self) -> bool {
        self.carrier.terms() == other.carrier.terms()
            && self.top == other.top
            && self.bounds == other.bounds
            && self.le1 == other.le1
            && self.le2 == other.le2
            && self.log == other.log
    }
}

impl Eq for Hierarchy {}

pub fn build_hierarchy(carrier: &ClosedSet, top: &OrdinalTerm) -> Result<Hierarchy, BuildError> {
    build_hierarchy_with(carrier, top, GameBounds::default())
}

pub fn build_hierarchy_with(
    carrier: &ClosedSet,
    top: &OrdinalTerm,
    bounds: GameBounds,
) -> Result<Hierarchy, BuildError> {
    if let Some(m) = first_missing(carrier.as_set()) {
        return Err(BuildError::NotClosed(m));
    }
    if !top.is_indecomposable() {
        return Err(BuildError::TopNotIndecomposable(top.clone()));
    }
    if carrier.max() >= top {
        return Err(BuildError::TopNotAbove {
            top: top.clone(),
            element: carrier.max().clone(),
        });
    }
    let n = carrier.len();
    let mut h = Hierarchy {
        carrier: Carrier::new(carrier),
        top: top.clone(),
        bounds,
        le1: Relation::upper(n),
        le2: Relation::upper(n),
        log: BuildLog::default(),
    };
    loop {
        let (le1, le2) = h.prune_round();
        let pruned_le1 = h.le1.count() - le1.count();
        let pruned_le2 = h.le2.count() - le2.count();
        h.log.rounds.push(RoundLog {
            round: h.log.rounds.len() + 1,
            pruned_le1,
            pruned_le2,
        });
        if pruned_le1 == 0 && pruned_le2 == 0 {
            break;
        }
        h.le1 = le1;
        h.le2 = le2;
    }
    Ok(h)
}

impl Hierarchy {
    /// Assembles a hierarchy from stored parts without re-running the game.
    /// Nothing beyond matching dimensions is checked; see
    /// [`Hierarchy::check_axioms`].
    pub fn from_parts(
        carrier: &ClosedSet,
        top: OrdinalTerm,
        bounds: GameBounds,
        le1: Relation,
        le2: Relation,
        log: BuildLog,
    ) -> Hierarchy {
        assert_eq!(le1.size(), carrier.len());
        assert_eq!(le2.size(), carrier.len());
        Hierarchy {
            carrier: Carrier::new(carrier),
            top,
            bounds,
            le1,
            le2,
            log,
        }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn terms(&self) -> &[OrdinalTerm] {
        self.carrier.terms()
    }

    pub fn top(&self) -> &OrdinalTerm {
        &self.top
    }

    pub fn bounds(&self) -> GameBounds {
        self.bounds
    }

    pub fn build_log(&self) -> &BuildLog {
        &self.log
    }

    pub fn relation(&self, k: u8) -> &Relation {
        match k {
            1 => &self.le1,
            2 => &self.le2,
            _ => panic!("no relation le{k}"),
        }
    }

    pub fn le(&self, k: u8, i: usize, j: usize) -> bool {
        match k {
            0 => i <= j,
            _ => self.relation(k).get(i, j),
        }
    }

    pub fn index_of(&self, t: &OrdinalTerm) -> Option<usize> {
        self.carrier.index_of(t)
    }

    pub fn to_structure(&self) -> Structure {
        let terms = self.terms();
        let pairs = |r: &Relation| {
            let n = terms.len();
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| r.get(i, j))
                .map(|(i, j)| (terms[i].clone(), terms[j].clone()))
                .collect()
        };
        Structure {
            universe: terms.iter().cloned().collect(),
            le1: pairs(&self.le1),
            le2: pairs(&self.le2),
        }
    }

    /// True when the relations satisfy every pattern clause.
    pub fn is_valid(&self) -> bool {
        validate_pattern(&self.to_structure()).is_empty()
    }

    /// The closed substructure on ascending carrier indices. The hierarchy
    /// must be valid and `points` closed.
    pub fn substructure(&self, points: &[usize]) -> Pattern {
        Pattern::from_parts(
            points.iter().map(|&i| self.carrier.term(i).clone()).collect(),
            self.le1.restrict(points),
            self.le2.restrict(points),
        )
    }

    /// One game round plus structural clauses applied to the current
    /// relations. At a fixed point this returns them unchanged.
    pub fn prune_round(&self) -> (Relation, Relation) {
        let game = Game {
            carrier: &self.carrier,
            le1: &self.le1,
            le2: &self.le2,
            bounds: self.bounds,
        };
        let n = self.carrier.len();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|b| (0..b).map(move |a| (a, b)))
            .filter(|&(a, b)| self.le1.get(a, b))
            .collect();
        let verdicts: Vec<(bool, bool)> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let keep1 = game.sigma1(a, b, None);
                let keep2 = keep1 && self.le2.get(a, b) && game.sigma2(a, b, None);
                (keep1, keep2)
            })
            .collect();
        let mut le1 = self.le1.clone();
        let mut le2 = self.le2.clone();
        for (&(a, b), &(keep1, keep2)) in pairs.iter().zip(&verdicts) {
            if !keep1 {
                le1.set(a, b, false);
            }
            if !keep2 {
                le2.set(a, b, false);
            }
        }
        enforce_structure(&self.carrier, &mut le1, &mut le2);
        (le1, le2)
    }

    /// Whether the `k`-round game for `α ≤ β` can be won with every moved
    /// image above each threshold `τ < α`, skipping the `window` largest
    /// thresholds. The unthresholded game must be won as well.
    pub fn le_inf(&self, k: u8, alpha: &OrdinalTerm, beta: &OrdinalTerm, window: usize) -> Result<bool, QueryError> {
        let a = self.index_of(alpha).ok_or_else(|| QueryError::NotInCarrier(alpha.clone()))?;
        let b = self.index_of(beta).ok_or_else(|| QueryError::NotInCarrier(beta.clone()))?;
        if a > b {
            return Err(QueryError::NotOrdered(alpha.clone(), beta.clone()));
        }
        if !(1..=2).contains(&k) {
            return Err(QueryError::BadLevel(k));
        }
        Ok(self.le_inf_idx(k, a, b, window))
    }

    fn le_inf_idx(&self, k: u8, a: usize, b: usize, window: usize) -> bool {
        if a == b {
            return true;
        }
        let game = Game {
            carrier: &self.carrier,
            le1: &self.le1,
            le2: &self.le2,
            bounds: self.bounds,
        };
        let play = |thr: Option<usize>| match k {
            1 => game.sigma1(a, b, thr),
            _ => game.sigma2(a, b, thr),
        };
        play(None) && (0..a.saturating_sub(window)).all(|t| play(Some(t)))
    }

    /// Checks hypotheses (b)–(d) exactly and evaluates (a) and limit
    /// continuity as diagnostics.
    pub fn check_axioms(&self, window: usize) -> AxiomReport {
        let mut report = AxiomReport {
            window,
            ..AxiomReport::default()
        };
        for v in validate_pattern(&self.to_structure()) {
            match v.clause() {
                "c" => report.respect.push(v),
                "closed" => report.arithmetic.push(v.to_string()),
                _ => report.orders.push(v),
            }
        }
        if !self.top.is_indecomposable() {
            report.arithmetic.push(format!("top {} is not indecomposable", self.top));
        }
        if let Some(max) = self.terms().last() {
            if *max >= self.top {
                report.arithmetic.push(format!("carrier element {max} is not below top {}", self.top));
            }
        }
        if !report.orders.is_empty() || !report.respect.is_empty() {
            // the games are only meaningful on valid relations
            return report;
        }
        let terms = self.terms();
        for k in 1..=2u8 {
            for (a, b) in self.relation(k).strict_pairs() {
                if !self.le_inf_idx(k, a, b, window) {
                    report.cofinal.push((k, terms[a].clone(), terms[b].clone()));
                }
            }
        }
        let n = terms.len();
        for b in 0..n {
            if !terms[b].is_limit() {
                continue;
            }
            for a in 0..b {
                if (a..b).all(|x| self.le1.get(a, x)) && !self.le1.get(a, b) {
                    report.continuity.push((terms[a].clone(), terms[b].clone()));
                }
            }
        }
        report
    }
}

/// Outcome of [`Hierarchy::check_axioms`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    /// (b): partial orders with `le2 ⊆ le1 ⊆ le0`.
    pub orders: Vec<Violation>,
    /// (c): respect.
    pub respect: Vec<Violation>,
    /// (d): closed carrier below an indecomposable top.
    pub arithmetic: Vec<String>,
    /// (a) diagnostic: strict pairs whose game fails cofinally.
    pub cofinal: Vec<(u8, OrdinalTerm, OrdinalTerm)>,
    /// Pairs `α < β`, `β` a limit, with `α ≤₁ ξ` for all `ξ ∈ [α, β)` but not `α ≤₁ β`.
    pub continuity: Vec<(OrdinalTerm, OrdinalTerm)>,
    pub window: usize,
}

impl AxiomReport {
    /// (b), (c) and (d) all hold.
    pub fn exact_ok(&self) -> bool {
        self.orders.is_empty() && self.respect.is_empty() && self.arithmetic.is_empty()
    }
}

struct Game<'a> {
    carrier: &'a Carrier,
    le1: &'a Relation,
    le2: &'a Relation,
    bounds: GameBounds,
}

impl Game<'_> {
    /// Closures of every `moves`-subset of `[a, b)`.
    fn spoiler_sets(&self, a: usize, b: usize) -> BTreeSet<Vec<usize>> {
        let pool: Vec<usize> = (a..b).collect();
        subsets(&pool, self.bounds.moves.min(pool.len()))
            .map(|ys| self.carrier.closure(&ys))
            .collect()
    }

    fn first_round<'s>(&'s self, shape: &'s Shape, x: &[usize], a: usize, thr: Option<usize>) -> Search<'s> {
        let slots = x
            .iter()
            .filter(|&&i| self.carrier.is_indecomposable(i))
            .map(|&i| {
                if i < a {
                    Slot::Fixed(i)
                } else {
                    Slot::Free { above: thr, below: Some(a) }
                }
            })
            .collect();
        Search::new(shape, self.carrier, self.le1, self.le2, slots).image_below(Some(a))
    }

    fn sigma1(&self, a: usize, b: usize, thr: Option<usize>) -> bool {
        self.spoiler_sets(a, b).iter().all(|x| {
            let shape = Shape::from_carrier_subset(self.carrier, x, self.le1, self.le2);
            self.first_round(&shape, x, a, thr).exists()
        })
    }

    fn sigma2(&self, a: usize, b: usize, thr: Option<usize>) -> bool {
        self.spoiler_sets(a, b).iter().all(|x| {
            let shape = Shape::from_carrier_subset(self.carrier, x, self.le1, self.le2);
            let x_indecs: Vec<usize> = x.iter().copied().filter(|&i| self.carrier.is_indecomposable(i)).collect();
            self.first_round(&shape, x, a, thr)
                .run(&mut |h_ind, h_el| {
                    if self.replies_answered(a, b, &x_indecs, h_ind, h_el) {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                })
                .is_break()
        })
    }

    /// Every second-round reply to `h` can be mapped back into `[0, b)`.
    fn replies_answered(&self, a: usize, b: usize, x_indecs: &[usize], h_ind: &[usize], h_el: &[usize]) -> bool {
        let pool: Vec<usize> = (0..a).collect();
        let replies: BTreeSet<Vec<usize>> = subsets(&pool, self.bounds.replies.min(pool.len()))
            .map(|ys| {
                let mut gens = h_el.to_vec();
                gens.extend(ys);
                self.carrier.closure(&gens)
            })
            .collect();
        replies.iter().all(|z| {
            let shape = Shape::from_carrier_subset(self.carrier, z, self.le1, self.le2);
            let slots = z
                .iter()
                .filter(|&&i| self.carrier.is_indecomposable(i))
                .map(|i| match h_ind.iter().position(|j| j == i) {
                    Some(p) => Slot::Fixed(x_indecs[p]),
                    None => Slot::Free { above: None, below: Some(b) },
                })
                .collect();
            Search::new(&shape, self.carrier, self.le1, self.le2, slots)
                .image_below(Some(b))
                .exists()
        })
    }
}

/// All `k`-element subsets of `pool`, lexicographic.
pub(crate) fn subsets(pool: &[usize], k: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    let n = pool.len();
    let mut idx: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let cur = idx.take()?;
        let out = cur.iter().map(|&i| pool[i]).collect();
        let mut next = cur;
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                idx = Some(next);
                break;
            }
        }
        Some(out)
    })
}

/// Restores `le2 ⊆ le1`, indecomposability of strict `le2` pairs,
/// respect and transitivity by removing pairs until nothing changes.
fn enforce_structure(carrier: &Carrier, le1: &mut Relation, le2: &mut Relation) {
    let n = carrier.len();
    loop {
        let mut changed = false;
        let mut drop = |r: &mut Relation, i: usize, j: usize| {
            r.set(i, j, false);
            changed = true;
        };
        for c in 0..n {
            for a in 0..c {
                if le2.get(a, c)
                    && (!le1.get(a, c) || !carrier.is_indecomposable(a) || !carrier.is_indecomposable(c))
                {
                    drop(le2, a, c);
                }
            }
        }
        // respect: a ≤ b ≤ c and a ≤1 c force a ≤1 b
        for c in 0..n {
            for a in 0..c {
                if le1.get(a, c) && (a + 1..c).any(|b| !le1.get(a, b)) {
                    drop(le1, a, c);
                    if le2.get(a, c) {
                        drop(le2, a, c);
                    }
                }
            }
        }
        // respect: a ≤1 b ≤1 c and a ≤2 c force a ≤2 b
        for c in 0..n {
            for a in 0..c {
                if le2.get(a, c) && (a + 1..c).any(|b| le1.get(a, b) && le1.get(b, c) && !le2.get(a, b)) {
                    drop(le2, a, c);
                }
            }
        }
        // transitivity: drop the upper link of a broken chain
        for r in [&mut *le1, &mut *le2] {
            for a in 0..n {
                for b in a + 1..n {
                    if !r.get(a, b) {
                        continue;
                    }
                    for c in b + 1..n {
                        if r.get(b, c) && !r.get(a, c) {
                            drop(r, b, c);
                        }
                    }
                }
            }
        }
        for c in 0..n {
            for a in 0..c {
                if le2.get(a, c) && !le1.get(a, c) {
                    drop(le2, a, c);
                }
            }
        }
        if !changed {
            break;
        }
    }
}
