use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::program::Clause;
use super::term::{Atom, Literal, Term, Var};

/// Idempotent variable bindings. Every bound term is fully resolved, so a
/// single application pass is enough.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    bindings: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.bindings.keys()
    }

    /// Adds `v ↦ t`, keeping the map idempotent. Fails on an occurs-check
    /// violation.
    pub fn bind(&mut self, v: Var, t: Term) -> bool {
        if let Some(existing) = self.bindings.get(&v).cloned() {
            return unify_terms(&existing, &t, self);
        }
        let t = self.apply(&t);
        if t == Term::Var(v.clone()) {
            return true;
        }
        if t.occurs(&v) {
            return false;
        }
        let single = Substitution { bindings: BTreeMap::from([(v.clone(), t.clone())]) };
        for bound in self.bindings.values_mut() {
            if bound.occurs(&v) {
                *bound = single.apply(bound);
            }
        }
        self.bindings.insert(v, t);
        true
    }

    /// Builds a substitution from arbitrary pairs; `None` if they are cyclic.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Term)>) -> Option<Self> {
        let mut s = Substitution::new();
        for (v, t) in pairs {
            if !s.bind(v, t) {
                return None;
            }
        }
        Some(s)
    }

    /// A simultaneous renaming or matcher: pairs are inserted as given,
    /// without composing. Callers guarantee the range shares no variables
    /// with the domain.
    pub fn simultaneous(pairs: impl IntoIterator<Item = (Var, Term)>) -> Self {
        Substitution { bindings: pairs.into_iter().collect() }
    }

    pub fn restrict(&self, vars: &[Var]) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(v, _)| vars.contains(v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        }
    }

    pub fn apply<T: Substitute>(&self, x: &T) -> T {
        x.substitute(self)
    }

    pub fn into_map(self) -> BTreeMap<Var, Term> {
        self.bindings
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} ↦ {}", super::print::term_to_string(t))?;
        }
        write!(f, "}}")
    }
}

pub trait Substitute: Sized {
    fn substitute(&self, s: &Substitution) -> Self;
}

impl Substitute for Term {
    fn substitute(&self, s: &Substitution) -> Self {
        match self {
            Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| a.substitute(s)).collect()),
        }
    }
}

impl Substitute for Atom {
    fn substitute(&self, s: &Substitution) -> Self {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.substitute(s)).collect() }
    }
}

impl Substitute for Literal {
    fn substitute(&self, s: &Substitution) -> Self {
        match self {
            Literal::Atom(a) => Literal::Atom(a.substitute(s)),
            Literal::Builtin(op, l, r) => Literal::Builtin(*op, l.substitute(s), r.substitute(s)),
        }
    }
}

impl Substitute for Clause {
    fn substitute(&self, s: &Substitution) -> Self {
        Clause {
            id: self.id.clone(),
            head: self.head.substitute(s),
            body: self.body.iter().map(|l| l.substitute(s)).collect(),
        }
    }
}

impl<T: Substitute> Substitute for Vec<T> {
    fn substitute(&self, s: &Substitution) -> Self {
        self.iter().map(|x| x.substitute(s)).collect()
    }
}

/// Things that can be unified: terms, atoms and literals.
pub trait Unifiable {
    fn unify_into(&self, other: &Self, s: &mut Substitution) -> bool;
}

impl Unifiable for Term {
    fn unify_into(&self, other: &Self, s: &mut Substitution) -> bool {
        unify_terms(self, other, s)
    }
}

impl Unifiable for Atom {
    fn unify_into(&self, other: &Self, s: &mut Substitution) -> bool {
        self.pred == other.pred
            && self.args.len() == other.args.len()
            && self.args.iter().zip(&other.args).all(|(a, b)| unify_terms(a, b, s))
    }
}

impl Unifiable for Literal {
    fn unify_into(&self, other: &Self, s: &mut Substitution) -> bool {
        match (self, other) {
            (Literal::Atom(a), Literal::Atom(b)) => a.unify_into(b, s),
            (Literal::Builtin(o1, l1, r1), Literal::Builtin(o2, l2, r2)) => {
                o1 == o2 && unify_terms(l1, l2, s) && unify_terms(r1, r2, s)
            }
            _ => false,
        }
    }
}

fn unify_terms(a: &Term, b: &Term, s: &mut Substitution) -> bool {
    let a = s.apply(a);
    let b = s.apply(b);
    match (&a, &b) {
        // When both sides are variables the left one is bound, so callers
        // control which names survive.
        (Term::Var(v), _) => s.bind(v.clone(), b.clone()),
        (_, Term::Var(w)) => s.bind(w.clone(), a.clone()),
        (Term::Const(x), Term::Const(y)) => x == y,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify_terms(x, y, s))
        }
        _ => false,
    }
}

/// Most general unifier with occurs check; `None` when the two do not unify.
pub fn unify<T: Unifiable>(a: &T, b: &T) -> Option<Substitution> {
    let mut s = Substitution::new();
    a.unify_into(b, &mut s).then_some(s)
}

/// Extends `s` so that `s(a) = s(b)`.
pub fn unify_with<T: Unifiable>(a: &T, b: &T, s: &Substitution) -> Option<Substitution> {
    let mut s = s.clone();
    a.unify_into(b, &mut s).then_some(s)
}

/// One-way matching: extends `s` so that `s(pattern) == target`, binding
/// only variables of `pattern`. Target variables are treated as constants.
pub fn match_term(pattern: &Term, target: &Term, s: &mut Substitution) -> bool {
    match pattern {
        Term::Var(v) => match s.get(v) {
            Some(bound) => bound == target,
            None => {
                s.bindings.insert(v.clone(), target.clone());
                true
            }
        },
        Term::Const(c) => matches!(target, Term::Const(d) if c == d),
        Term::Compound(f, xs) => match target {
            Term::Compound(g, ys) if f == g && xs.len() == ys.len() => {
                xs.iter().zip(ys).all(|(x, y)| match_term(x, y, s))
            }
            _ => false,
        },
    }
}

/// Matching for literals. The resulting substitution is only idempotent when
/// pattern and target share no variables, so callers rename apart first.
pub fn match_literal(pattern: &Literal, target: &Literal, s: &mut Substitution) -> bool {
    match (pattern, target) {
        (Literal::Atom(p), Literal::Atom(t)) => {
            p.pred == t.pred
                && p.args.len() == t.args.len()
                && p.args.iter().zip(&t.args).all(|(x, y)| match_term(x, y, s))
        }
        (Literal::Builtin(o1, l1, r1), Literal::Builtin(o2, l2, r2)) => {
            o1 == o2 && match_term(l1, l2, s) && match_term(r1, r2, s)
        }
        _ => false,
    }
}

/// Renames the variables of `c` that appear in `avoid` to fresh indices.
pub fn rename_apart(c: &Clause, avoid: &BTreeSet<Var>) -> Clause {
    let (renaming, _) = renaming_avoiding(&c.vars(), avoid);
    c.substitute(&renaming)
}

/// A renaming of `vars` away from `avoid` (and from each other's images).
/// Returns the renaming and the extended set of used variables.
pub fn renaming_avoiding(vars: &[Var], avoid: &BTreeSet<Var>) -> (Substitution, BTreeSet<Var>) {
    let mut used: BTreeSet<Var> = avoid.iter().cloned().chain(vars.iter().cloned()).collect();
    let mut s = Substitution::new();
    for v in vars {
        if avoid.contains(v) {
            let fresh = (v.index + 1..)
                .map(|i| Var { name: v.name.clone(), index: i })
                .find(|w| !used.contains(w))
                .expect("unbounded search");
            used.insert(fresh.clone());
            s.bindings.insert(v.clone(), Term::Var(fresh));
        }
    }
    (s, used)
}

/// Renames every variable of `c` to a fresh index not present in `avoid`.
pub fn rename_all_apart(c: &Clause, avoid: &BTreeSet<Var>) -> Clause {
    let vars = c.vars();
    let mut all_avoid = avoid.clone();
    all_avoid.extend(vars.iter().cloned());
    let (renaming, _) = renaming_avoiding(&vars, &all_avoid);
    c.substitute(&renaming)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::kernel::arb;
    use crate::kernel::parse::{parse_clause, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    /// Every grounding of `vars` over a small universe.
    fn groundings(vars: &[Var]) -> Vec<Substitution> {
        let universe = [t("a"), t("b"), t("f(a)"), t("[]"), t("[a]")];
        let mut out = vec![Substitution::new()];
        for v in vars {
            out = out
                .into_iter()
                .flat_map(|s| {
                    universe.iter().map(move |u| {
                        let mut s = s.clone();
                        s.bindings.insert(v.clone(), u.clone());
                        s
                    })
                })
                .collect();
        }
        out
    }

    fn vars_of_pair(a: &Term, b: &Term) -> Vec<Var> {
        let mut vs = a.vars();
        for v in b.vars() {
            if !vs.contains(&v) {
                vs.push(v);
            }
        }
        vs
    }

    #[test]
    fn occurs_check_fails() {
        assert!(unify(&t("X"), &t("f(X)")).is_none());
        assert!(unify(&t("[X|Y]"), &t("Y")).is_none());
    }

    #[test]
    fn left_variable_is_bound() {
        let s = unify(&t("X"), &t("Y")).unwrap();
        assert_eq!(s.get(&Var::new("X", 0)), Some(&t("Y")));
    }

    #[test]
    fn bindings_stay_idempotent() {
        let s = unify(&t("g(X, Y)"), &t("g(Y, f(Z))")).unwrap();
        for (_, r) in s.iter() {
            assert_eq!(&s.apply(r), r);
        }
    }

    #[test]
    fn matching_binds_pattern_side_only() {
        let mut s = Substitution::new();
        assert!(match_term(&t("f(X)"), &t("f(g(Y, a))"), &mut s));
        assert!(!match_term(&t("f(a)"), &t("f(Y)"), &mut Substitution::new()));
        assert!(!match_term(&t("g(X, X)"), &t("g(a, b)"), &mut Substitution::new()));
    }

    #[test]
    fn rename_apart_avoids_given_vars() {
        let c = parse_clause("p(X, Y) :- q(Y, Z).").unwrap();
        let avoid: BTreeSet<Var> = [Var::new("X", 0), Var::new("Z", 0)].into();
        let r = rename_apart(&c, &avoid);
        assert!(r.vars().iter().all(|v| !avoid.contains(v)));
        assert!(r.vars().contains(&Var::new("Y", 0)));
        let all = rename_all_apart(&c, &BTreeSet::new());
        assert!(all.vars().iter().all(|v| !c.vars().contains(v)));
    }

    proptest! {
        #[test]
        fn unifier_equates_both_sides(a in arb::term(), b in arb::term()) {
            if let Some(s) = unify(&a, &b) {
                prop_assert_eq!(s.apply(&a), s.apply(&b));
            }
        }

        /// Oracle: any ground unifier over a small universe witnesses that
        /// the MGU exists, and factors through it.
        #[test]
        fn mgu_against_brute_force(a in arb::term(), b in arb::term()) {
            let vars = vars_of_pair(&a, &b);
            prop_assume!(vars.len() <= 3);
            let mgu = unify(&a, &b);
            for theta in groundings(&vars) {
                if theta.apply(&a) == theta.apply(&b) {
                    let sigma = mgu.as_ref().expect("ground unifier exists, so unify must succeed");
                    for v in &vars {
                        let x = Term::Var(v.clone());
                        prop_assert_eq!(theta.apply(&sigma.apply(&x)), theta.apply(&x));
                    }
                }
            }
        }

        #[test]
        fn unify_is_symmetric_in_success(a in arb::term(), b in arb::term()) {
            prop_assert_eq!(unify(&a, &b).is_some(), unify(&b, &a).is_some());
        }

        #[test]
        fn term_unifies_with_itself_trivially(a in arb::term()) {
            prop_assert!(unify(&a, &a).unwrap().is_empty());
        }
    }
}
