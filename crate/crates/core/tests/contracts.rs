//! Corpus predicates against independent Rust oracles on random inputs.

use std::collections::BTreeSet;

use lpt_core::abduce::weak_predicates;
use lpt_core::corpus::Corpus;
use lpt_core::engine::{bounded_extension, SolveLimits, Solver};
use lpt_core::kernel::{parse_program, parse_query, Program, Term};
use proptest::prelude::*;

fn answers(p: &Program, query: &str) -> Vec<Vec<Term>> {
    let q = parse_query(query).unwrap();
    let r = Solver::new(p).solve(&q, SolveLimits::default()).unwrap();
    assert!(r.exhausted, "{query} not exhausted");
    r.answers
        .iter()
        .map(|a| {
            let mut vs: Vec<_> = a.iter().collect();
            vs.sort_by_key(|(v, _)| v.to_string());
            vs.into_iter().map(|(_, t)| t.clone()).collect()
        })
        .collect()
}

fn list(xs: &[i64]) -> String {
    format!("{:?}", xs)
}

fn ints(t: &Term) -> Vec<i64> {
    t.list_items()
        .unwrap()
        .into_iter()
        .map(|x| match x {
            Term::Const(lpt_core::kernel::Constant::Int(n)) => *n,
            other => panic!("not an integer: {other:?}"),
        })
        .collect()
}

fn small_list(max: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(0i64..4, 0..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn filter_and_partition_split_by_pivot(a in 0i64..4, l in small_list(6)) {
        let c = Corpus::builtin();
        let le: Vec<i64> = l.iter().copied().filter(|&x| x <= a).collect();
        let gt: Vec<i64> = l.iter().copied().filter(|&x| x > a).collect();
        for name in ["filter", "partition"] {
            let p = c.program(name).unwrap();
            let got = answers(&p, &format!("{name}({a}, {}, X, Y)", list(&l)));
            prop_assert_eq!(got.len(), 1);
            prop_assert_eq!(ints(&got[0][0]), le.clone());
            prop_assert_eq!(ints(&got[0][1]), gt.clone());
        }
    }

    #[test]
    fn split_alternates(l in small_list(7)) {
        let p = Corpus::builtin().program("split").unwrap();
        let got = answers(&p, &format!("split({}, X, Y)", list(&l)));
        prop_assert_eq!(got.len(), 1);
        let (x, y) = (ints(&got[0][0]), ints(&got[0][1]));
        let even: Vec<i64> = l.iter().copied().step_by(2).collect();
        let odd: Vec<i64> = l.iter().copied().skip(1).step_by(2).collect();
        // The odd-length tail element goes to the second list.
        if l.len() % 2 == 0 {
            prop_assert_eq!((x, y), (even, odd));
        } else {
            prop_assert_eq!(x.len() + 1, y.len());
            let mut all = [x, y].concat();
            all.sort_unstable();
            let mut want = l.clone();
            want.sort_unstable();
            prop_assert_eq!(all, want);
        }
    }

    #[test]
    fn derived_sorters_agree_with_std_sort(l in proptest::collection::vec(0i64..6, 0..=7)) {
        let c = Corpus::builtin();
        let mut want = l.clone();
        want.sort_unstable();
        for (name, pred) in [("tamaki_sato", "sort_TS"), ("inssort", "inssort"), ("selsort", "selsort"), ("msort", "msort"), ("qsort", "qsort")] {
            let p = c.program(name).unwrap();
            let got: BTreeSet<Vec<i64>> = answers(&p, &format!("{pred}({}, X)", list(&l))).iter().map(|a| ints(&a[0])).collect();
            prop_assert_eq!(got, BTreeSet::from([want.clone()]), "{}", name);
        }
    }

    #[test]
    fn append_concatenates(a in small_list(4), b in small_list(4)) {
        let p = Corpus::builtin().program("append").unwrap();
        let got = answers(&p, &format!("append({}, {}, X)", list(&a), list(&b)));
        prop_assert_eq!(got.len(), 1);
        prop_assert_eq!(ints(&got[0][0]), [a, b].concat());
    }
}

/// Weak predicates can never succeed, so their bounded extensions are empty.
#[test]
fn weak_predicates_have_empty_extensions() {
    let texts = [
        "p(X) :- q(X).\nq(X) :- r(X).\ns(a).",
        "p(X) :- p(X), z(X).\nq(a).",
        "p([X|Y]) :- t(Y).\nt(Y) :- u(Y), p(Y).\nw(X) :- p(X), X =< 1.",
        "a(X) :- b(X).\nb(X) :- a(X), m(X).\nc(1).",
    ];
    let limits = SolveLimits::default().with_max_steps(50_000);
    for t in texts {
        let p = parse_program(t).unwrap();
        let weak = weak_predicates(&p);
        assert!(!weak.is_empty(), "{t}");
        for k in weak {
            let m = bounded_extension(&p, &k, &[0, 1], 2, limits);
            if let Ok(m) = m {
                assert!(m.atoms.is_empty(), "{k} in {t}");
            }
        }
    }
}

#[test]
fn corpus_sorters_are_not_weak() {
    let c = Corpus::builtin();
    for name in ["naive_sort", "tamaki_sato", "inssort", "selsort", "msort", "qsort"] {
        let p = c.program(name).unwrap();
        assert!(weak_predicates(&p).iter().all(|k| !p.defines(k)), "{name}");
    }
}
