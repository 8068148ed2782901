use std::collections::HashMap;

use crate::ordinal::{ClosedSet, OrdinalTerm};

/// A closed set indexed in ascending order, with each element's summands
/// resolved to indices so embeddings can be computed without term arithmetic.
#[derive(Clone, Debug)]
pub struct Carrier {
    elems: Vec<OrdinalTerm>,
    index: HashMap<OrdinalTerm, usize>,
    summands: Vec<Vec<usize>>,
    by_summands: HashMap<Vec<usize>, usize>,
    indecs: Vec<usize>,
}

impl Carrier {
    pub fn new(set: &ClosedSet) -> Carrier {
        let elems = set.to_vec();
        let index: HashMap<OrdinalTerm, usize> =
            elems.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let summands: Vec<Vec<usize>> = elems
            .iter()
            .map(|t| t.summands().map(|s| index[&s]).collect())
            .collect();
        let by_summands = summands.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let indecs = (0..elems.len()).filter(|&i| elems[i].is_indecomposable()).collect();
        Carrier {
            elems,
            index,
            summands,
            by_summands,
            indecs,
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn term(&self, i: usize) -> &OrdinalTerm {
        &self.elems[i]
    }

    pub fn terms(&self) -> &[OrdinalTerm] {
        &self.elems
    }

    pub fn index_of(&self, t: &OrdinalTerm) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// Summand indices of element `i`, largest first.
    pub fn summands(&self, i: usize) -> &[usize] {
        &self.summands[i]
    }

    /// The element whose summands are exactly `s`, if present.
    pub fn compose(&self, s: &[usize]) -> Option<usize> {
        self.by_summands.get(s).copied()
    }

    pub fn is_indecomposable(&self, i: usize) -> bool {
        self.summands[i].len() == 1
    }

    /// Indecomposable indices, ascending.
    pub fn indecomposables(&self) -> &[usize] {
        &self.indecs
    }

    /// Closure of a set of indices, ascending.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut out = vec![0usize];
        for &g in gens {
            let s = &self.summands[g];
            for len in 1..=s.len() {
                out.push(self.by_summands[&s[..len]]);
                out.push(s[len - 1]);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}
