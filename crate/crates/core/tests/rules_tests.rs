mod common;

use std::collections::BTreeSet;

use common::*;
use patternforge::carriers::{shipped, FAMILY};
use patternforge::covering::{test_cofinal_validity, Budget};
use patternforge::format::{read_rule, write_rule};
use patternforge::pattern::is_closed_substructure;
use patternforge::rules::*;
use patternforge::{closure, OrdinalTerm, Pattern};

fn patterns(max_len: usize) -> Vec<Pattern> {
    let host = shipped("c20").unwrap().build();
    shape_representatives(small_closed_subsets(host.terms(), max_len))
        .iter()
        .flat_map(|u| all_patterns_on(u))
        .collect()
}

fn subsets<T: Clone + Ord>(items: &[T]) -> Vec<BTreeSet<T>> {
    (0u32..1 << items.len())
        .map(|m| items.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, x)| x.clone()).collect())
        .collect()
}

fn check_instance(r: &RuleInstance) {
    assert!(is_closed_substructure(r.premise(), r.conclusion()));
    let text = write_rule(r);
    assert_eq!(&read_rule(&text).unwrap(), r);
}

#[test]
fn reflection_instances_keep_their_invariants() {
    let (mut built, mut no_room) = (0, 0);
    for p in patterns(4) {
        for (a, b) in p.strict_pairs(1) {
            if !a.is_indecomposable() {
                continue;
            }
            let span: Vec<OrdinalTerm> = p.universe().iter().filter(|x| **x >= a && **x <= b).cloned().collect();
            for x in subsets(&span) {
                match make_reflect1_down(&p, &a, &b, &x) {
                    Ok(r) => {
                        check_instance(&r);
                        assert_eq!(r.kind(), RuleKind::Reflect1Down);
                        let low = p.universe().iter().filter(|y| **y < a).max().unwrap();
                        let added: Vec<&OrdinalTerm> =
                            r.conclusion().universe().iter().filter(|y| p.position(y).is_none()).collect();
                        assert!(added.iter().all(|y| *y > low && **y < a), "copy sits between the gap ends");
                        if x.is_empty() {
                            assert_eq!(r.conclusion(), &p);
                        }
                        built += 1;
                    }
                    Err(RuleError::NoRoom { .. }) => no_room += 1,
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
    assert!(built > 20 && no_room > 0, "{built} built, {no_room} without room");
}

#[test]
fn arithmetic_extensions_add_no_indecomposables() {
    let host = shipped("c20").unwrap().build();
    let mut built = 0;
    for p in patterns(3) {
        for extra in host.terms().iter().filter(|x| p.position(x).is_none()) {
            let new: BTreeSet<OrdinalTerm> = [extra.clone()].into();
            match make_arith_ext(&p, &new) {
                Ok(r) => {
                    check_instance(&r);
                    let u = r.conclusion().universe();
                    assert!(closure(u.iter()).iter().eq(u.iter()));
                    assert_eq!(
                        u.iter().filter(|x| x.is_indecomposable()).count(),
                        p.indecomposable_positions().len()
                    );
                    built += 1;
                }
                Err(RuleError::NewIndecomposable(i)) => assert!(p.position(&i).is_none()),
                Err(e) => panic!("{e}"),
            }
        }
    }
    assert!(built > 10, "{built}");
}

#[test]
fn identity_instances_hold_everywhere() {
    for c in FAMILY.iter().filter(|c| c.name != "c25") {
        let host = c.build();
        for u in shape_representatives(small_closed_subsets(host.terms(), 3)) {
            for p in all_patterns_on(&u) {
                let r = make_generic(&p, &p).unwrap();
                let v = test_cofinal_validity(r.premise(), r.conclusion(), &host, Budget::default()).unwrap();
                assert!(v.is_valid(), "{}", c.name);
            }
        }
    }
}

#[test]
fn constructor_errors() {
    let p = pattern(&["0", "w", "w^(2)"], &[("w", "w^(2)")], &[]);
    let one: BTreeSet<OrdinalTerm> = [t("1")].into();
    assert_eq!(make_arith_ext(&p, &one), Err(RuleError::NewIndecomposable(t("1"))));
    let q = pattern(&["0", "1"], &[], &[]);
    assert_eq!(make_generic(&p, &q), Err(RuleError::NotSubstructure));
    let x: BTreeSet<OrdinalTerm> = [t("w^(2)")].into();
    assert_eq!(
        make_reflect1_down(&p, &t("w^(2)"), &t("w"), &x),
        Err(RuleError::NotStrictLe1(t("w^(2)"), t("w")))
    );
    assert_eq!(
        make_reflect1_down(&p, &t("1"), &t("w"), &x),
        Err(RuleError::NotInUniverse(t("1")))
    );
    let outside: BTreeSet<OrdinalTerm> = [t("0")].into();
    assert!(matches!(
        make_reflect1_down(&p, &t("w"), &t("w^(2)"), &outside),
        Err(RuleError::OutOfRange(..))
    ));
    assert_eq!("reflect1_down".parse::<RuleKind>(), Ok(RuleKind::Reflect1Down));
    assert!("sideways".parse::<RuleKind>().is_err());
}

#[test]
fn reflection_example_is_pinned() {
    let p = pattern(&["0", "w", "w^(2)"], &[("w", "w^(2)")], &[("w", "w^(2)")]);
    let x: BTreeSet<OrdinalTerm> = [t("w^(2)")].into();
    let r = make_reflect1_down(&p, &t("w"), &t("w^(2)"), &x).unwrap();
    assert_golden("reflect-example.json", &write_rule(&r));
}
