//! Backtracking search for arithmetic embeddings into a carrier.
//!
//! Both the hierarchy game and the covering engine reduce to the same
//! question: given a closed source (described by its indecomposables and
//! how every element decomposes over them), find strictly increasing
//! images for the indecomposables so that every induced element image lies
//! in the carrier and the listed source pairs land in the target relations.
//! Images are tried in ascending order, so complete assignments come out in
//! lexicographic order of the indecomposable images.

use std::ops::ControlFlow;

use crate::carrier::Carrier;
use crate::ordinal::OrdinalTerm;
use crate::relation::Relation;

/// A closed source structure with the pairs an embedding has to preserve.
#[derive(Clone, Debug)]
pub(crate) struct Shape {
    n_indec: usize,
    /// Summands of each element as positions into the indecomposables,
    /// largest first. The zero element has none.
    elems: Vec<Vec<usize>>,
    rel1: Vec<(usize, usize)>,
    rel2: Vec<(usize, usize)>,
}

impl Shape {
    pub fn new(
        n_indec: usize,
        elems: Vec<Vec<usize>>,
        rel1: Vec<(usize, usize)>,
        rel2: Vec<(usize, usize)>,
    ) -> Shape {
        Shape {
            n_indec,
            elems,
            rel1,
            rel2,
        }
    }

    /// Shape of an ascending list of terms forming a closed set. Pairs are
    /// positions into `universe`.
    pub fn from_terms(universe: &[OrdinalTerm], rel1: Vec<(usize, usize)>, rel2: Vec<(usize, usize)>) -> Shape {
        let indecs: Vec<&OrdinalTerm> = universe.iter().filter(|t| t.is_indecomposable()).collect();
        let elems = universe
            .iter()
            .map(|t| {
                t.summands()
                    .map(|s| indecs.binary_search(&&s).expect("universe is closed"))
                    .collect()
            })
            .collect();
        Shape::new(indecs.len(), elems, rel1, rel2)
    }

    /// Shape of an ascending closed subset of a carrier, with the strict
    /// pairs of `le1`/`le2` among its members.
    pub fn from_carrier_subset(carrier: &Carrier, subset: &[usize], le1: &Relation, le2: &Relation) -> Shape {
        let indecs: Vec<usize> = subset.iter().copied().filter(|&i| carrier.is_indecomposable(i)).collect();
        let elems = subset
            .iter()
            .map(|&x| {
                carrier
                    .summands(x)
                    .iter()
                    .map(|s| indecs.binary_search(s).expect("subset is closed"))
                    .collect()
            })
            .collect();
        let pairs = |r: &Relation| {
            let mut out = Vec::new();
            for (a, &x) in subset.iter().enumerate() {
                for (b, &y) in subset.iter().enumerate() {
                    if a != b && r.get(x, y) {
                        out.push((a, b));
                    }
                }
            }
            out
        };
        Shape::new(indecs.len(), elems, pairs(le1), pairs(le2))
    }

    pub fn n_indec(&self) -> usize {
        self.n_indec
    }
}

/// Where one source indecomposable may go. Bounds are exclusive carrier indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Slot {
    Fixed(usize),
    Free { above: Option<usize>, below: Option<usize> },
}

/// Receives `(indecomposable_images, element_images)`.
type Visit<'a> = dyn FnMut(&[usize], &[usize]) -> ControlFlow<()> + 'a;

pub(crate) struct Search<'a> {
    shape: &'a Shape,
    carrier: &'a Carrier,
    le1: &'a Relation,
    le2: &'a Relation,
    slots: Vec<Slot>,
    /// Every element image must be below this index.
    image_below: Option<usize>,
    // per stage (0 = before any indecomposable, i + 1 = after position i)
    stage_elems: Vec<Vec<usize>>,
    stage_rel1: Vec<Vec<(usize, usize)>>,
    stage_rel2: Vec<Vec<(usize, usize)>>,
}

impl<'a> Search<'a> {
    pub fn new(shape: &'a Shape, carrier: &'a Carrier, le1: &'a Relation, le2: &'a Relation, slots: Vec<Slot>) -> Self {
        assert_eq!(slots.len(), shape.n_indec);
        let stages = shape.n_indec + 1;
        let stage_of = |e: usize| shape.elems[e].first().map_or(0, |&p| p + 1);
        let mut stage_elems = vec![Vec::new(); stages];
        for e in 0..shape.elems.len() {
            stage_elems[stage_of(e)].push(e);
        }
        let split = |rel: &[(usize, usize)]| {
            let mut out = vec![Vec::new(); stages];
            for &(a, b) in rel {
                out[stage_of(a).max(stage_of(b))].push((a, b));
            }
            out
        };
        Search {
            shape,
            carrier,
            le1,
            le2,
            slots,
            image_below: None,
            stage_rel1: split(&shape.rel1),
            stage_rel2: split(&shape.rel2),
            stage_elems,
        }
    }

    pub fn image_below(mut self, bound: Option<usize>) -> Self {
        self.image_below = bound;
        self
    }

    /// Calls `visit(indecomposable_images, element_images)` for every
    /// embedding in lexicographic order until it breaks.
    pub fn run(&self, visit: &mut Visit<'_>) -> ControlFlow<()> {
        let mut ind = vec![usize::MAX; self.shape.n_indec];
        let mut el = vec![usize::MAX; self.shape.elems.len()];
        if !self.settle(0, &ind, &mut el) {
            return ControlFlow::Continue(());
        }
        self.step(0, &mut ind, &mut el, visit)
    }

    pub fn exists(&self) -> bool {
        self.run(&mut |_, _| ControlFlow::Break(())).is_break()
    }

    fn step(
        &self,
        pos: usize,
        ind: &mut Vec<usize>,
        el: &mut Vec<usize>,
        visit: &mut Visit<'_>,
    ) -> ControlFlow<()> {
        if pos == self.shape.n_indec {
            return visit(ind, el);
        }
        let prev = if pos == 0 { None } else { Some(ind[pos - 1]) };
        let candidates: &[usize] = match self.slots[pos] {
            Slot::Fixed(t) => std::slice::from_ref(match self.carrier.indecomposables().binary_search(&t) {
                Ok(i) => &self.carrier.indecomposables()[i],
                Err(_) => return ControlFlow::Continue(()),
            }),
            Slot::Free { .. } => self.carrier.indecomposables(),
        };
        let (above, below) = match self.slots[pos] {
            Slot::Fixed(_) => (None, None),
            Slot::Free { above, below } => (above, below),
        };
        for &c in candidates {
            if prev.is_some_and(|p| c <= p) || above.is_some_and(|a| c <= a) {
                continue;
            }
            if below.is_some_and(|b| c >= b) || self.image_below.is_some_and(|b| c >= b) {
                break;
            }
            ind[pos] = c;
            if self.settle(pos + 1, ind, el) {
                self.step(pos + 1, ind, el, visit)?;
            }
        }
        ControlFlow::Continue(())
    }

    /// Computes the images completed at `stage` and checks their pairs.
    fn settle(&self, stage: usize, ind: &[usize], el: &mut [usize]) -> bool {
        let mut buf = Vec::new();
        for &e in &self.stage_elems[stage] {
            buf.clear();
            buf.extend(self.shape.elems[e].iter().map(|&p| ind[p]));
            let Some(img) = self.carrier.compose(&buf) else {
                return false;
            };
            if self.image_below.is_some_and(|b| img >= b) {
                return false;
            }
            el[e] = img;
        }
        self.stage_rel1[stage].iter().all(|&(a, b)| self.le1.get(el[a], el[b]))
            && self.stage_rel2[stage].iter().all(|&(a, b)| self.le2.get(el[a], el[b]))
    }
}
