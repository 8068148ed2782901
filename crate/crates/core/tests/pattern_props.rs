mod common;

use std::collections::BTreeSet;

use common::*;
use patternforge::carriers::shipped;
use patternforge::covering::{search_coverings, Constraints};
use patternforge::pattern::{find_isomorphism, pointwise_le, CardinalityMismatch};
use patternforge::{validate_pattern, OrdinalTerm, Pattern, Structure};
use proptest::prelude::*;

/// Universes of up to five elements: closed subsets of a mixed carrier.
fn universes() -> Vec<Vec<OrdinalTerm>> {
    let gens: Vec<OrdinalTerm> = ["w+1", "w^(2)", "2"].iter().map(|s| t(s)).collect();
    let carrier = patternforge::closure(gens.iter()).to_vec();
    small_closed_subsets(&carrier, 5)
}

/// Pattern clauses straight from their definitions.
fn oracle_valid(s: &Structure) -> bool {
    let u: Vec<&OrdinalTerm> = s.universe.iter().collect();
    let in1 = |a: &OrdinalTerm, b: &OrdinalTerm| s.le1.contains(&(a.clone(), b.clone()));
    let in2 = |a: &OrdinalTerm, b: &OrdinalTerm| s.le2.contains(&(a.clone(), b.clone()));
    let le0 = |a: &OrdinalTerm, b: &OrdinalTerm| a <= b;
    let inside = |r: &BTreeSet<(OrdinalTerm, OrdinalTerm)>| r.iter().all(|(a, b)| s.universe.contains(a) && s.universe.contains(b));
    if !inside(&s.le1) || !inside(&s.le2) {
        return false;
    }
    for rel in [&in1 as &dyn Fn(&OrdinalTerm, &OrdinalTerm) -> bool, &in2] {
        for &a in &u {
            if !rel(a, a) {
                return false;
            }
            for &b in &u {
                if a != b && rel(a, b) && rel(b, a) {
                    return false;
                }
                for &c in &u {
                    if rel(a, b) && rel(b, c) && !rel(a, c) {
                        return false;
                    }
                }
            }
        }
    }
    for &a in &u {
        for &b in &u {
            if (in1(a, b) && !le0(a, b)) || (in2(a, b) && !in1(a, b)) {
                return false;
            }
            for &c in &u {
                if le0(a, b) && le0(b, c) && in1(a, c) && !in1(a, b) {
                    return false;
                }
                if in1(a, b) && in1(b, c) && in2(a, c) && !in2(a, b) {
                    return false;
                }
            }
        }
    }
    true
}

fn structure_strategy() -> impl Strategy<Value = Structure> {
    let us = universes();
    (0..us.len(), any::<u32>(), any::<u32>(), any::<bool>()).prop_map(move |(i, m1, m2, sub)| {
        let u = &us[i];
        let pairs: Vec<(OrdinalTerm, OrdinalTerm)> = u
            .iter()
            .flat_map(|a| u.iter().map(move |b| (a.clone(), b.clone())))
            .filter(|(a, b)| a != b)
            .collect();
        let pick = |m: u32| -> BTreeSet<_> {
            pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| m >> (k % 32) & 1 == 1 && (k / 32 == 0 || m >> (31 - k % 32) & 1 == 1))
                .map(|(_, p)| p.clone())
                .collect()
        };
        let le1 = pick(m1);
        // often make le2 a subset of le1 so deeper clauses get exercised
        let le2 = if sub { pick(m2).intersection(&le1).cloned().collect() } else { pick(m2) };
        Structure {
            universe: u.iter().cloned().collect(),
            le1,
            le2,
        }
        .with_reflexive()
    })
}

fn set() -> impl Strategy<Value = BTreeSet<u8>> {
    prop::collection::btree_set(0u8..12, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn validate_agrees_with_definitions(s in structure_strategy()) {
        prop_assert_eq!(validate_pattern(&s).is_empty(), oracle_valid(&s));
    }
}

proptest! {
    #[test]
    fn pointwise_order_is_a_partial_order(x in set(), y in set(), z in set()) {
        prop_assert!(pointwise_le(&x, &x).unwrap());
        if pointwise_le(&x, &y).unwrap() && pointwise_le(&y, &x).unwrap() {
            prop_assert_eq!(&x, &y);
        }
        if pointwise_le(&x, &y).unwrap() && pointwise_le(&y, &z).unwrap() {
            prop_assert!(pointwise_le(&x, &z).unwrap());
        }
    }
}

#[test]
fn pointwise_needs_equal_sizes() {
    let a: BTreeSet<u8> = [1, 2].into();
    let b: BTreeSet<u8> = [1].into();
    assert_eq!(pointwise_le(&a, &b), Err(CardinalityMismatch(2, 1)));
}

/// Each covering range whose restriction is isomorphic to the pattern gives
/// an isomorphism whose reverse is its inverse.
#[test]
fn isomorphisms_invert() {
    let h = shipped("c20").unwrap().build();
    let mut checked = 0;
    for u in shape_representatives(small_closed_subsets(h.terms(), 4)) {
        for p in all_patterns_on(&u) {
            for c in search_coverings(&p, &h, &Constraints::default()) {
                let points: Vec<usize> = c.range().iter().map(|x| h.index_of(x).unwrap()).collect();
                let q: Pattern = h.substructure(&points);
                let Some(f) = find_isomorphism(&p, &q) else { continue };
                let g = find_isomorphism(&q, &p).expect("isomorphism is symmetric");
                for (a, b) in &f {
                    assert_eq!(&g[b], a);
                }
                assert_eq!(&f, c.assignment());
                checked += 1;
            }
        }
    }
    assert!(checked > 10, "{checked}");
}
