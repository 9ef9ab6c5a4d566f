use serde::Serialize;

use crate::kernel::{match_literal, Clause, Literal, Substitute, Substitution};
use crate::rules::fold::renamed_folder;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AbduceError {
    #[error("no folder body literal matches the selected literals")]
    NoPartialMatch,
    #[error("folder body is empty")]
    EmptyFolder,
    #[error("position {0} out of range")]
    IndexOutOfRange(usize),
    #[error(transparent)]
    Rule(#[from] crate::rules::RuleError),
    #[error(transparent)]
    Engine(crate::engine::EngineError),
}

/// Folder body literals left unmatched by one partial match.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Complement {
    pub missing: Vec<Literal>,
    #[serde(skip)]
    pub substitution: Substitution,
    /// Folder body indices matched, in order.
    pub matched: Vec<usize>,
}

/// Order-preserving injections of `targets` into `folder_body`, matching
/// folder literals onto targets.
fn partial_matches(folder_body: &[Literal], targets: &[&Literal]) -> Vec<(Vec<usize>, Substitution)> {
    fn go(
        body: &[Literal],
        targets: &[&Literal],
        start: usize,
        s: Substitution,
        chosen: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, Substitution)>,
    ) {
        let Some((first, rest)) = targets.split_first() else {
            out.push((chosen.clone(), s));
            return;
        };
        for i in start..body.len() {
            let mut s2 = s.clone();
            if match_literal(&body[i], first, &mut s2) {
                chosen.push(i);
                go(body, rest, i + 1, s2, chosen, out);
                chosen.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(folder_body, targets, 0, Substitution::new(), &mut Vec::new(), &mut out);
    out
}

/// For each way of matching folder body literals onto all `selected` body
/// literals of `target` (in order, instantiating folder variables only),
/// the instantiated folder literals that remain unmatched. Unbound folder
/// variables stay fresh for `target`.
pub fn plain_complement(target: &Clause, selected: &[usize], folder: &Clause) -> Result<Vec<Complement>, AbduceError> {
    if folder.body.is_empty() {
        return Err(AbduceError::EmptyFolder);
    }
    if let Some(&bad) = selected.iter().find(|&&i| i >= target.body.len()) {
        return Err(AbduceError::IndexOutOfRange(bad));
    }
    let f = renamed_folder(target, folder);
    let lits: Vec<&Literal> = selected.iter().map(|&i| &target.body[i]).collect();
    let matches = partial_matches(&f.body, &lits);
    if matches.is_empty() {
        return Err(AbduceError::NoPartialMatch);
    }
    Ok(matches
        .into_iter()
        .map(|(matched, s)| {
            let missing = f
                .body
                .iter()
                .enumerate()
                .filter(|(i, _)| !matched.contains(i))
                .map(|(_, l)| l.substitute(&s))
                .collect();
            Complement { missing, substitution: s, matched }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{clause_names, literal_with_names, parse_clause, Term};

    #[test]
    fn tamaki_sato_complement() {
        let t = parse_clause("sort_TS([A|Ls1], Ls3) :- perm1(Ls1, Ls2), insert(A, Ls2, Ls3), ord1(Ls3).").unwrap();
        let f = parse_clause("sort_TS(L, M) :- perm1(L, M), ord1(M).").unwrap();
        let cs = plain_complement(&t, &[0], &f).unwrap();
        assert_eq!(cs.len(), 1);
        let names = clause_names(&t);
        assert_eq!(literal_with_names(&cs[0].missing[0], &names), "ord1(Ls2)");
        let renamed = renamed_folder(&t, &f);
        let l = renamed.head.args[0].clone();
        assert_eq!(cs[0].substitution.apply(&l), Term::var("Ls1"));
    }

    #[test]
    fn propositional_complement() {
        let t = parse_clause("p :- q, t.").unwrap();
        let f = parse_clause("s :- q, r.").unwrap();
        let cs = plain_complement(&t, &[0], &f).unwrap();
        assert_eq!(cs[0].missing, vec![Literal::atom("r", vec![])]);
    }

    #[test]
    fn full_match_leaves_nothing() {
        let t = parse_clause("p :- q, r.").unwrap();
        let f = parse_clause("s :- q, r.").unwrap();
        assert!(plain_complement(&t, &[0, 1], &f).unwrap()[0].missing.is_empty());
    }

    #[test]
    fn empty_selection_asks_for_whole_body() {
        let t = parse_clause("p(X) :- t(X).").unwrap();
        let f = parse_clause("s(Y) :- q(Y), r(Y).").unwrap();
        let cs = plain_complement(&t, &[], &f).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].missing.len(), 2);
        let tv = t.vars();
        assert!(cs[0].missing.iter().flat_map(|l| l.vars()).all(|v| !tv.contains(&v)));
    }

    #[test]
    fn unmatched_selection_is_an_error() {
        let t = parse_clause("p :- z.").unwrap();
        let f = parse_clause("s :- q, r.").unwrap();
        assert_eq!(plain_complement(&t, &[0], &f), Err(AbduceError::NoPartialMatch));
    }
}
