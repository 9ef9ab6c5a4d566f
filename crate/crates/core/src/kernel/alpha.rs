use super::program::{Clause, Program};
use super::subst::{Substitute, Substitution};
use super::term::{Atom, Literal, Term, Var};

/// The clause with ids dropped and variables renumbered by first occurrence.
/// Two clauses are alpha-equivalent iff their normal forms are equal.
pub fn normal_form(c: &Clause) -> (Atom, Vec<Literal>) {
    let renaming = Substitution::simultaneous(
        c.vars()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, Term::Var(Var::new("#", i as u32)))),
    );
    let c = c.substitute(&renaming);
    (c.head, c.body)
}

pub fn alpha_equivalent_clauses(a: &Clause, b: &Clause) -> bool {
    normal_form(a) == normal_form(b)
}

/// True iff the clause multisets agree up to per-clause variable renaming.
/// Clause order and ids are ignored; body order is not.
pub fn alpha_equivalent_programs(p1: &Program, p2: &Program) -> bool {
    if p1.len() != p2.len() {
        return false;
    }
    let mut a: Vec<_> = p1.clauses().iter().map(normal_form).collect();
    let mut b: Vec<_> = p2.clauses().iter().map(normal_form).collect();
    a.sort();
    b.sort();
    a == b
}

/// Clauses of `p1` without an alpha-equivalent partner in `p2` (as a
/// multiset), for diagnostics.
pub fn unmatched_clauses<'a>(p1: &'a Program, p2: &Program) -> Vec<&'a Clause> {
    let mut pool: Vec<_> = p2.clauses().iter().map(normal_form).collect();
    let mut out = Vec::new();
    for c in p1.clauses() {
        let nf = normal_form(c);
        match pool.iter().position(|x| *x == nf) {
            Some(i) => {
                pool.swap_remove(i);
            }
            None => out.push(c),
        }
    }
    out
}
