use std::collections::BTreeSet;

use super::{check_index, target, RuleError, RuleOutcome, Safety};
use crate::kernel::{rename_apart, unify, Clause, Literal, Program, Substitute};

/// Resolves body literal `position` of clause `id` against every defining
/// clause of its predicate. The resolvent from the k-th defining clause gets
/// id `{id}.{k}` and sits where the target clause was.
pub fn unfold(p: &Program, id: &str, position: usize) -> Result<RuleOutcome, RuleError> {
    let c = target(p, id)?;
    check_index(position, c.body.len())?;
    let Literal::Atom(selected) = &c.body[position] else {
        return Err(RuleError::BuiltinPosition(position));
    };
    let avoid: BTreeSet<_> = c.vars().into_iter().collect();
    let mut resolvents = Vec::new();
    for (k, d) in p.clauses_for(&selected.key()).enumerate() {
        let d = rename_apart(d, &avoid);
        // Atom on the left: where both sides are variables the defining
        // clause's names survive.
        let Some(s) = unify(selected, &d.head) else {
            continue;
        };
        let mut body: Vec<Literal> = c.body[..position].to_vec();
        body.extend(d.body.iter().cloned());
        body.extend(c.body[position + 1..].iter().cloned());
        let r = Clause::new(format!("{id}.{}", k + 1), c.head.clone(), body).substitute(&s);
        resolvents.push(r);
    }
    let mut out = p.clone();
    let ids: Vec<String> = resolvents.iter().map(|r| r.id.clone()).collect();
    let empty = resolvents.is_empty();
    out.replace(id, resolvents);
    for r in &ids {
        out.set_provenance(r, format!("unfold {id}@{position}"));
    }
    let mut outcome = RuleOutcome::new(out, Safety::SemanticsPreserving);
    if empty {
        outcome.flags.push(format!("unfolding {} produced no resolvents; clause {id} deleted", selected.key()));
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_program, program_to_string};

    #[test]
    fn unfolds_perm1_in_naive_sorter() {
        let p = parse_program(
            "sort_TS(Ls1, Ls2) :- perm1(Ls1, Ls2), ord1(Ls2).\n\
             perm1([], []).\n\
             perm1([A|Ls1], Ls3) :- perm1(Ls1, Ls2), insert(A, Ls2, Ls3).",
        )
        .unwrap();
        let out = unfold(&p, "c1", 0).unwrap();
        assert_eq!(out.safety, Safety::SemanticsPreserving);
        let text = program_to_string(&out.program);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "sort_TS([], []) :- ord1([]).");
        assert_eq!(lines[1], "sort_TS([A|Ls1], Ls3) :- perm1(Ls1, Ls2), insert(A, Ls2, Ls3), ord1(Ls3).");
        assert_eq!(out.program.clauses()[0].id, "c1.1");
        assert_eq!(out.program.clauses()[1].id, "c1.2");
    }

    #[test]
    fn propositional_unfold() {
        let p = parse_program("p :- q.\nq :- r.\nq :- s.").unwrap();
        let out = unfold(&p, "c1", 0).unwrap();
        assert_eq!(program_to_string(&out.program), "p :- r.\np :- s.\nq :- r.\nq :- s.\n");
    }

    #[test]
    fn undefined_atom_deletes_clause() {
        let p = parse_program("p :- q.\nr.").unwrap();
        let out = unfold(&p, "c1", 0).unwrap();
        assert_eq!(out.program.len(), 1);
        assert_eq!(out.flags.len(), 1);
    }

    #[test]
    fn rejects_builtins_and_bad_positions() {
        let p = parse_program("p(X) :- X =< 1.").unwrap();
        assert_eq!(unfold(&p, "c1", 0), Err(RuleError::BuiltinPosition(0)));
        assert_eq!(unfold(&p, "c1", 3), Err(RuleError::IndexOutOfRange { index: 3, len: 1 }));
        assert_eq!(unfold(&p, "zz", 0), Err(RuleError::UnknownClause("zz".into())));
    }
}
