#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use patternforge::ordinal::first_missing;
use patternforge::{OrdinalTerm, Pattern, Structure};

pub fn t(s: &str) -> OrdinalTerm {
    s.parse().unwrap()
}

pub fn pattern(universe: &[&str], le1: &[(&str, &str)], le2: &[(&str, &str)]) -> Pattern {
    let pairs = |ps: &[(&str, &str)]| ps.iter().map(|(a, b)| (t(a), t(b))).collect();
    Pattern::new(
        &Structure {
            universe: universe.iter().map(|s| t(s)).collect(),
            le1: pairs(le1),
            le2: pairs(le2),
        }
        .with_reflexive(),
    )
    .unwrap()
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
pub fn golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path)
        .map_err(|e| format!("{}: {e} (run with UPDATE_GOLDEN=1 to create)", path.display()))?;
    if expected == actual {
        return Ok(());
    }
    let line = expected
        .lines()
        .zip(actual.lines())
        .position(|(a, b)| a != b)
        .unwrap_or_else(|| expected.lines().count().min(actual.lines().count()));
    Err(format!("{name} differs from golden at line {}", line + 1))
}

pub fn assert_golden(name: &str, actual: &str) {
    if let Err(e) = golden(name, actual) {
        panic!("{e}");
    }
}

/// Closed subsets of `carrier` with at most `max_len` elements, by brute force.
pub fn small_closed_subsets(carrier: &[OrdinalTerm], max_len: usize) -> Vec<Vec<OrdinalTerm>> {
    let rest: Vec<&OrdinalTerm> = carrier.iter().filter(|x| !x.is_zero()).collect();
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn go<'a>(
        rest: &[&'a OrdinalTerm],
        from: usize,
        left: usize,
        pick: &mut Vec<&'a OrdinalTerm>,
        out: &mut Vec<Vec<OrdinalTerm>>,
    ) {
        let set: BTreeSet<OrdinalTerm> = std::iter::once(OrdinalTerm::zero())
            .chain(pick.iter().map(|x| (*x).clone()))
            .collect();
        if first_missing(&set).is_none() {
            out.push(set.into_iter().collect());
        }
        if left == 0 {
            return;
        }
        for i in from..rest.len() {
            pick.push(rest[i]);
            go(rest, i + 1, left - 1, pick, out);
            pick.pop();
        }
    }
    go(&rest, 0, max_len.saturating_sub(1), &mut pick, &mut out);
    out
}

/// Summand positions over the indecomposables: equal keys mean the order
/// isomorphism between two closed sets is arithmetic.
pub fn shape(set: &[OrdinalTerm]) -> Vec<Vec<usize>> {
    let indecs: Vec<&OrdinalTerm> = set.iter().filter(|x| x.is_indecomposable()).collect();
    set.iter()
        .map(|x| x.summands().map(|s| indecs.iter().position(|i| **i == s).unwrap()).collect())
        .collect()
}

/// One closed subset per shape, first in enumeration order.
pub fn shape_representatives(sets: Vec<Vec<OrdinalTerm>>) -> Vec<Vec<OrdinalTerm>> {
    let mut seen = BTreeMap::new();
    for s in sets {
        seen.entry(shape(&s)).or_insert(s);
    }
    let mut reps: Vec<Vec<OrdinalTerm>> = seen.into_values().collect();
    reps.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    reps
}

/// Every valid pattern on `universe`, by brute force over pair subsets.
pub fn all_patterns_on(universe: &[OrdinalTerm]) -> Vec<Pattern> {
    let pairs: Vec<(usize, usize)> = (0..universe.len())
        .flat_map(|i| (i + 1..universe.len()).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for m1 in 0u32..1 << pairs.len() {
        for m2 in 0u32..1 << pairs.len() {
            if m2 & !m1 != 0 {
                continue;
            }
            let pick = |m: u32| -> BTreeSet<(OrdinalTerm, OrdinalTerm)> {
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| m >> b & 1 == 1)
                    .map(|(_, &(i, j))| (universe[i].clone(), universe[j].clone()))
                    .collect()
            };
            let s = Structure {
                universe: universe.iter().cloned().collect(),
                le1: pick(m1),
                le2: pick(m2),
            }
            .with_reflexive();
            if let Ok(p) = Pattern::new(&s) {
                out.push(p);
            }
        }
    }
    out
}

/// Strictly increasing maps from `n` points into `0..m`.
pub fn increasing_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(n: usize, m: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in from..m {
            cur.push(x);
            go(n, m, x + 1, cur, out);
            cur.pop();
        }
    }
    go(n, m, 0, &mut cur, &mut out);
    out
}
