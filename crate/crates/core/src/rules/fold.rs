use std::collections::BTreeSet;

use serde::Serialize;

use super::{target, RuleError, RuleOutcome, Safety};
use crate::kernel::{match_literal, rename_all_apart, var_set, Clause, Literal, Program, Substitute, Substitution, Term, Var};

/// A way of matching a folder body onto target body literals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldMatch {
    pub positions: Vec<usize>,
    #[serde(serialize_with = "ser_subst")]
    pub substitution: Substitution,
}

fn ser_subst<S: serde::Serializer>(s: &Substitution, ser: S) -> Result<S::Ok, S::Error> {
    ser.collect_str(s)
}

/// The folder renamed so that it shares no variable with `c`.
pub(crate) fn renamed_folder(c: &Clause, folder: &Clause) -> Clause {
    let avoid: BTreeSet<Var> = c.vars().into_iter().collect();
    rename_all_apart(folder, &avoid)
}

fn extend_matches(
    body: &[Literal],
    pattern: &[Literal],
    start: usize,
    s: Substitution,
    chosen: &mut Vec<usize>,
    out: &mut Vec<FoldMatch>,
) {
    let Some((first, rest)) = pattern.split_first() else {
        out.push(FoldMatch { positions: chosen.clone(), substitution: s });
        return;
    };
    for i in start..body.len() {
        let mut s2 = s.clone();
        if match_literal(first, &body[i], &mut s2) {
            chosen.push(i);
            extend_matches(body, rest, i + 1, s2, chosen, out);
            chosen.pop();
        }
    }
}

/// Every ordered subsequence of the body of `c` that is an instance of the
/// (renamed) folder body, in lexicographic order of positions.
pub fn fold_matches(c: &Clause, folder: &Clause) -> Vec<FoldMatch> {
    let f = renamed_folder(c, folder);
    let mut out = Vec::new();
    extend_matches(&c.body, &f.body, 0, Substitution::new(), &mut Vec::new(), &mut out);
    out
}

fn match_at(c: &Clause, f: &Clause, positions: &[usize]) -> Option<FoldMatch> {
    if positions.len() != f.body.len() || positions.windows(2).any(|w| w[0] >= w[1]) {
        return None;
    }
    let mut s = Substitution::new();
    for (lit, &i) in f.body.iter().zip(positions) {
        if !match_literal(lit, c.body.get(i)?, &mut s) {
            return None;
        }
    }
    Some(FoldMatch { positions: positions.to_vec(), substitution: s })
}

/// Internal folder variables must map to distinct variables that occur
/// nowhere in `c` outside the folded literals.
fn check_variable_condition(c: &Clause, f: &Clause, m: &FoldMatch) -> Result<(), RuleError> {
    let head_vars: BTreeSet<Var> = f.head.args.iter().flat_map(Term::vars).collect();
    let internal: Vec<Var> = f.body_vars().into_iter().filter(|v| !head_vars.contains(v)).collect();
    let outside: BTreeSet<Var> = {
        let mut lits: Vec<&Literal> = Vec::new();
        let head = Literal::Atom(c.head.clone());
        lits.push(&head);
        lits.extend(c.body.iter().enumerate().filter(|(i, _)| !m.positions.contains(i)).map(|(_, l)| l));
        var_set(lits)
    };
    let mut images = BTreeSet::new();
    for v in internal {
        let image = m.substitution.get(&v).cloned().unwrap_or(Term::Var(v.clone()));
        let Term::Var(w) = image else {
            return Err(RuleError::VariableConditionViolated(v.to_string()));
        };
        if outside.contains(&w) || !images.insert(w) {
            return Err(RuleError::VariableConditionViolated(v.to_string()));
        }
    }
    // Head images may not reuse an internal image either.
    let head_image_vars: BTreeSet<Var> = f.head.args.iter().flat_map(|t| m.substitution.apply(t).vars()).collect();
    if let Some(w) = images.iter().find(|w| head_image_vars.contains(w)) {
        return Err(RuleError::VariableConditionViolated(w.to_string()));
    }
    Ok(())
}

/// Replaces the selected body literals of clause `id` by the instantiated
/// head of `folder`, placed at the first selected position. Without explicit
/// positions the `match_index`-th match from [`fold_matches`] is used.
pub fn fold(
    p: &Program,
    id: &str,
    positions: Option<&[usize]>,
    folder: &Clause,
    match_index: usize,
) -> Result<RuleOutcome, RuleError> {
    let c = target(p, id)?;
    let f = renamed_folder(c, folder);
    let m = match positions {
        Some(ps) => {
            if let Some(&bad) = ps.iter().find(|&&i| i >= c.body.len()) {
                return Err(RuleError::IndexOutOfRange { index: bad, len: c.body.len() });
            }
            match_at(c, &f, ps).ok_or(RuleError::NoMatch)?
        }
        None => {
            let mut all = Vec::new();
            extend_matches(&c.body, &f.body, 0, Substitution::new(), &mut Vec::new(), &mut all);
            if all.is_empty() {
                return Err(RuleError::NoMatch);
            }
            let count = all.len();
            all.into_iter().nth(match_index).ok_or(RuleError::MatchIndexOutOfRange { index: match_index, count })?
        }
    };
    check_variable_condition(c, &f, &m)?;
    let new_atom = Literal::Atom(f.head.substitute(&m.substitution));
    let mut body = Vec::with_capacity(c.body.len() + 1 - m.positions.len());
    for (i, l) in c.body.iter().enumerate() {
        if i == m.positions[0] {
            body.push(new_atom.clone());
        }
        if !m.positions.contains(&i) {
            body.push(l.clone());
        }
    }
    if body.iter().any(|l| l.as_atom() == Some(&c.head)) {
        return Err(RuleError::SelfFoldWithoutRecursionGuard);
    }
    let mut out = p.clone();
    let folded = Clause::new(c.id.clone(), c.head.clone(), body);
    out.replace(id, vec![folded]);
    out.set_provenance(id, format!("fold with {}", folder.id));
    Ok(RuleOutcome::new(out, Safety::SemanticsPreserving))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{clause_to_string, parse_clause, parse_program};

    fn folded(p: &str, id: &str, positions: Option<&[usize]>, folder: &str) -> Result<String, RuleError> {
        let p = parse_program(p).unwrap();
        let f = parse_clause(folder).unwrap();
        let out = fold(&p, id, positions, &f, 0)?;
        Ok(clause_to_string(out.program.clause(id).unwrap()))
    }

    #[test]
    fn tamaki_sato_fold() {
        let got = folded(
            "sort_TS([A|Ls1], Ls3) :- perm1(Ls1, Ls2), ord1(Ls2), insert(A, Ls2, Ls3), ord1(Ls3).",
            "c1",
            Some(&[0, 1]),
            "sort_TS(L, M) :- perm1(L, M), ord1(M).",
        )
        .unwrap();
        assert_eq!(got, "sort_TS([A|Ls1], Ls3) :- sort_TS(Ls1, Ls2), insert(A, Ls2, Ls3), ord1(Ls3).");
    }

    #[test]
    fn propositional_fold_keeps_rest() {
        let got = folded("p :- q, r, t.", "c1", None, "s :- q, r.").unwrap();
        assert_eq!(got, "p :- s, t.");
    }

    #[test]
    fn non_contiguous_selection() {
        let got = folded("p :- q, t, r.", "c1", Some(&[0, 2]), "s :- q, r.").unwrap();
        assert_eq!(got, "p :- s, t.");
    }

    #[test]
    fn internal_variable_must_be_local() {
        let e = folded("p(X) :- q(X, Y), r(Y), t(Y).", "c1", Some(&[0, 1]), "s(A) :- q(A, Z), r(Z).");
        assert!(matches!(e, Err(RuleError::VariableConditionViolated(_))));
        let ok = folded("p(X) :- q(X, Y), r(Y), t(X).", "c1", Some(&[0, 1]), "s(A) :- q(A, Z), r(Z).").unwrap();
        assert_eq!(ok, "p(X) :- s(X), t(X).");
    }

    #[test]
    fn internal_variables_need_distinct_images() {
        let e = folded("p :- q(Y, Y).", "c1", None, "s :- q(U, V).");
        assert!(matches!(e, Err(RuleError::VariableConditionViolated(_))));
    }

    #[test]
    fn self_fold_is_rejected() {
        let e = folded("p(X) :- q(X), r(X).", "c1", None, "p(Y) :- q(Y), r(Y).");
        assert_eq!(e, Err(RuleError::SelfFoldWithoutRecursionGuard));
    }

    #[test]
    fn lists_all_matches() {
        let c = parse_clause("p :- q(1), q(2), r.").unwrap();
        let f = parse_clause("s(X) :- q(X).").unwrap();
        let ms = fold_matches(&c, &f);
        assert_eq!(ms.iter().map(|m| m.positions.clone()).collect::<Vec<_>>(), vec![vec![0], vec![1]]);
        let p = parse_program("p :- q(1), q(2), r.").unwrap();
        let out = fold(&p, "c1", None, &f, 1).unwrap();
        assert_eq!(clause_to_string(&out.program.clauses()[0]), "p :- q(1), s(2), r.");
        assert_eq!(fold(&p, "c1", None, &f, 5), Err(RuleError::MatchIndexOutOfRange { index: 5, count: 2 }));
    }

    #[test]
    fn mismatch_is_reported() {
        assert_eq!(folded("p :- q.", "c1", None, "s :- r."), Err(RuleError::NoMatch));
    }
}
