//! Proptest strategies over a small signature, shared by kernel and rule tests.

use proptest::prelude::*;

use super::program::Clause;
use super::term::{Atom, BuiltinOp, Literal, Term, Var};

pub const VAR_NAMES: [&str; 3] = ["X", "Y", "Z"];

pub fn var() -> impl Strategy<Value = Var> {
    (0..VAR_NAMES.len(), 0u32..2).prop_map(|(i, k)| Var::new(VAR_NAMES[i], k))
}

pub fn constant() -> impl Strategy<Value = Term> {
    prop_oneof![
        Just(Term::sym("a")),
        Just(Term::sym("b")),
        Just(Term::nil()),
        (0i64..4).prop_map(Term::int),
    ]
}

pub fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![var().prop_map(Term::Var), constant()];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::compound("f", vec![t])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::compound("g", vec![a, b])),
            (inner.clone(), inner).prop_map(|(h, t)| Term::cons(h, t)),
        ]
    })
}

pub fn atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        term().prop_map(|t| Atom::new("p", vec![t])),
        (term(), term()).prop_map(|(a, b)| Atom::new("q", vec![a, b])),
    ]
}

pub fn literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        4 => atom().prop_map(Literal::Atom),
        1 => (term(), term()).prop_map(|(a, b)| Literal::Builtin(BuiltinOp::Leq, a, b)),
    ]
}

pub fn clause() -> impl Strategy<Value = Clause> {
    (atom(), proptest::collection::vec(literal(), 0..4)).prop_map(|(h, b)| Clause::new("c1", h, b))
}
