use std::collections::{BTreeMap, BTreeSet};

use super::{check_index, target, Justification, RuleError, RuleOutcome, Safety};
use crate::engine::{solve, SolveLimits};
use crate::kernel::{
    match_literal, rename_all_apart, Atom, Clause, Literal, PredKey, Program, Substitution, Var,
};

/// Inserts `lit` into the body of clause `id` before `position`
/// (`position == len` appends).
pub fn introduce_goal(p: &Program, id: &str, lit: Literal, position: usize) -> Result<RuleOutcome, RuleError> {
    let c = target(p, id)?;
    if position > c.body.len() {
        return Err(RuleError::IndexOutOfRange { index: position, len: c.body.len() + 1 });
    }
    let mut out = p.clone();
    let body = &mut out.clause_mut(id).expect("target exists").body;
    body.insert(position, lit);
    Ok(RuleOutcome::new(out, Safety::ThinningRisk))
}

pub fn delete_goal(p: &Program, id: &str, position: usize) -> Result<RuleOutcome, RuleError> {
    let c = target(p, id)?;
    check_index(position, c.body.len())?;
    let mut out = p.clone();
    out.clause_mut(id).expect("target exists").body.remove(position);
    Ok(RuleOutcome::new(out, Safety::WideningRisk))
}

/// Appends definitions of predicates that are new to `p`. Clause ids become
/// `{pred}.{k}`.
pub fn define(p: &Program, clauses: Vec<Clause>) -> Result<RuleOutcome, RuleError> {
    if clauses.is_empty() {
        return Err(RuleError::EmptyDefinition);
    }
    let mentioned = p.mentioned_predicates();
    let mut counts: BTreeMap<PredKey, usize> = BTreeMap::new();
    let mut out = p.clone();
    for mut c in clauses {
        let k = c.key();
        if p.defines(&k) || mentioned.contains(&k) {
            return Err(RuleError::PredicateAlreadyDefined(k.to_string()));
        }
        let n = counts.entry(k.clone()).or_insert(0);
        *n += 1;
        c.id = out.fresh_id(&format!("{}.{}", k.name, n));
        let id = c.id.clone();
        out.push(c).expect("fresh id");
        out.set_provenance(&id, "definition");
    }
    Ok(RuleOutcome::new(out, Safety::SemanticsPreserving))
}

fn rename_atom(a: &Atom, old: &PredKey, new: &PredKey) -> Atom {
    if a.key() == *old {
        Atom { pred: new.name.clone(), args: a.args.clone() }
    } else {
        a.clone()
    }
}

pub fn rename_predicate(p: &Program, old: &PredKey, new: &PredKey) -> Result<RuleOutcome, RuleError> {
    if old.arity != new.arity {
        return Err(RuleError::ArityMismatch { old: old.to_string(), new: new.to_string() });
    }
    let mentioned = p.mentioned_predicates();
    if !p.defines(old) && !mentioned.contains(old) {
        return Err(RuleError::UnknownPredicate(old.to_string()));
    }
    if old == new {
        return Ok(RuleOutcome::new(p.clone(), Safety::SemanticsPreserving));
    }
    if p.defines(new) || mentioned.contains(new) {
        return Err(RuleError::PredicateAlreadyDefined(new.to_string()));
    }
    let mut out = p.clone();
    let ids: Vec<String> = p.clauses().iter().map(|c| c.id.clone()).collect();
    for id in ids {
        let c = out.clause_mut(&id).expect("id from program");
        c.head = rename_atom(&c.head, old, new);
        for l in &mut c.body {
            if let Literal::Atom(a) = l {
                *a = rename_atom(a, old, new);
            }
        }
    }
    Ok(RuleOutcome::new(out, Safety::SemanticsPreserving))
}

/// `general` subsumes `specific` when some instance of `general` has the
/// head of `specific` and a body whose literals all occur in its body.
pub fn subsumes(general: &Clause, specific: &Clause) -> bool {
    let avoid: BTreeSet<Var> = specific.vars().into_iter().collect();
    let g = rename_all_apart(general, &avoid);
    let mut s = Substitution::new();
    if !match_literal(&Literal::Atom(g.head.clone()), &Literal::Atom(specific.head.clone()), &mut s) {
        return false;
    }
    fn cover(pattern: &[Literal], body: &[Literal], s: &Substitution) -> bool {
        let Some((first, rest)) = pattern.split_first() else {
            return true;
        };
        body.iter().any(|l| {
            let mut s2 = s.clone();
            match_literal(first, l, &mut s2) && cover(rest, body, &s2)
        })
    }
    cover(&g.body, &specific.body, &s)
}

/// Limits for the finite-failure check behind `UnsatisfiableBody`.
const UNSAT_LIMITS: SolveLimits = SolveLimits { max_depth: 1_000, max_steps: 200_000, max_answers: 1 };

pub fn delete_clause(
    p: &Program,
    id: &str,
    justification: Justification,
    subsumer: Option<&str>,
) -> Result<RuleOutcome, RuleError> {
    let c = target(p, id)?;
    let safety = match justification {
        Justification::Subsumed => {
            let sid = subsumer.unwrap_or_default();
            let ok = p.clause(sid).is_some_and(|s| s.id != c.id && subsumes(s, c));
            if !ok {
                return Err(RuleError::SubsumptionCheckFailed { clause: id.into(), subsumer: sid.into() });
            }
            Safety::SemanticsPreserving
        }
        Justification::UnsatisfiableBody => {
            let r = solve(p, &c.body, UNSAT_LIMITS).map_err(|_| RuleError::UnsatisfiabilityNotShown(id.into()))?;
            if !(r.answers.is_empty() && r.exhausted) {
                return Err(RuleError::UnsatisfiabilityNotShown(id.into()));
            }
            Safety::SemanticsPreserving
        }
        // Removing a clause can only shrink the least model.
        Justification::UserAsserted => Safety::ThinningRisk,
    };
    let mut out = p.clone();
    out.remove(id);
    Ok(RuleOutcome::new(out, safety))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_clause, parse_literal, parse_program, program_to_string};

    #[test]
    fn introduce_and_delete_goal() {
        let p = parse_program("p(X) :- q(X).").unwrap();
        let out = introduce_goal(&p, "c1", parse_literal("r(X)").unwrap(), 1).unwrap();
        assert_eq!(out.safety, Safety::ThinningRisk);
        assert_eq!(program_to_string(&out.program), "p(X) :- q(X), r(X).\n");
        let back = delete_goal(&out.program, "c1", 1).unwrap();
        assert_eq!(back.safety, Safety::WideningRisk);
        assert_eq!(back.program, p);
        assert!(introduce_goal(&p, "c1", parse_literal("r").unwrap(), 3).is_err());
        assert!(delete_goal(&p, "c1", 1).is_err());
    }

    #[test]
    fn define_new_predicate() {
        let p = parse_program("sort(X, Y) :- perm(X, Y).").unwrap();
        let d = parse_clause("new(L1, L2, L3) :- shuffle(L1, L2, L3), ord2(L3).").unwrap();
        let out = define(&p, vec![d]).unwrap();
        assert_eq!(out.program.clauses()[1].id, "new.1");
        assert_eq!(out.program.provenance("new.1"), Some("definition"));
        let dup = parse_clause("sort(A, B).").unwrap();
        assert_eq!(define(&p, vec![dup]), Err(RuleError::PredicateAlreadyDefined("sort/2".into())));
    }

    #[test]
    fn rename_everywhere() {
        let p = parse_program("sort(X, Y) :- sort(Y, X).").unwrap();
        let out = rename_predicate(&p, &PredKey::new("sort", 2), &PredKey::new("sort_TS", 2)).unwrap();
        assert_eq!(program_to_string(&out.program), "sort_TS(X, Y) :- sort_TS(Y, X).\n");
        let same = rename_predicate(&p, &PredKey::new("sort", 2), &PredKey::new("sort", 2)).unwrap();
        assert_eq!(same.program, p);
        assert_eq!(
            rename_predicate(&p, &PredKey::new("nope", 1), &PredKey::new("x", 1)),
            Err(RuleError::UnknownPredicate("nope/1".into()))
        );
    }

    #[test]
    fn subsumption_checks() {
        let p = parse_program("p(X) :- q(X), r(X).\np(X) :- q(X).").unwrap();
        let out = delete_clause(&p, "c1", Justification::Subsumed, Some("c2")).unwrap();
        assert_eq!(out.safety, Safety::SemanticsPreserving);
        assert_eq!(out.program.len(), 1);
        assert!(matches!(
            delete_clause(&p, "c2", Justification::Subsumed, Some("c1")),
            Err(RuleError::SubsumptionCheckFailed { .. })
        ));
        assert!(matches!(delete_clause(&p, "c1", Justification::Subsumed, None), Err(RuleError::SubsumptionCheckFailed { .. })));
    }

    #[test]
    fn unsatisfiable_body_is_machine_checked() {
        let p = parse_program("p :- 1 < 0.\nq :- 0 < 1.").unwrap();
        assert_eq!(delete_clause(&p, "c1", Justification::UnsatisfiableBody, None).unwrap().safety, Safety::SemanticsPreserving);
        assert!(delete_clause(&p, "c2", Justification::UnsatisfiableBody, None).is_err());
        assert_eq!(delete_clause(&p, "c2", Justification::UserAsserted, None).unwrap().safety, Safety::ThinningRisk);
    }
}
