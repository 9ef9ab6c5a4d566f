use std::collections::BTreeSet;

use serde::Serialize;

use super::{target, Orientation, RuleError, RuleOutcome, Safety};
use crate::kernel::{match_literal, renaming_avoiding, vars_of, Clause, Literal, Program, Substitute, Substitution, Var};
use crate::verify::{Lemma, LemmaKind};

/// Body positions matched by the side conditions followed by those matched
/// by the rewritten side of the lemma.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaMatch {
    pub side_positions: Vec<usize>,
    pub source_positions: Vec<usize>,
    #[serde(skip)]
    pub substitution: Substitution,
}

struct Oriented {
    side: Vec<Literal>,
    source: Vec<Literal>,
    replacement: Vec<Literal>,
}

fn orient(c: &Clause, lemma: &Lemma, o: Orientation) -> Oriented {
    let lits: Vec<Literal> = lemma.literals().cloned().collect();
    let vars = vars_of(&lits);
    let mut avoid: BTreeSet<Var> = c.vars().into_iter().collect();
    avoid.extend(vars.iter().cloned());
    let (r, _) = renaming_avoiding(&vars, &avoid);
    let side = lemma.side_conditions.substitute(&r);
    let lhs = lemma.lhs.substitute(&r);
    let rhs = lemma.rhs.substitute(&r);
    match o {
        Orientation::LeftToRight => Oriented { side, source: lhs, replacement: rhs },
        Orientation::RightToLeft => Oriented { side, source: rhs, replacement: lhs },
    }
}

fn search(body: &[Literal], pattern: &[Literal], used: &mut Vec<usize>, s: Substitution, out: &mut Vec<(Vec<usize>, Substitution)>) {
    let Some((first, rest)) = pattern.split_first() else {
        out.push((used.clone(), s));
        return;
    };
    for (i, l) in body.iter().enumerate() {
        if used.contains(&i) {
            continue;
        }
        let mut s2 = s.clone();
        if match_literal(first, l, &mut s2) {
            used.push(i);
            search(body, rest, used, s2, out);
            used.pop();
        }
    }
}

fn matches_oriented(c: &Clause, o: &Oriented) -> Vec<LemmaMatch> {
    let mut pattern = o.side.clone();
    pattern.extend(o.source.iter().cloned());
    let mut raw = Vec::new();
    search(&c.body, &pattern, &mut Vec::new(), Substitution::new(), &mut raw);
    let k = o.side.len();
    raw.into_iter()
        .map(|(ps, s)| LemmaMatch { side_positions: ps[..k].to_vec(), source_positions: ps[k..].to_vec(), substitution: s })
        .collect()
}

/// Every way the oriented lemma's side conditions and source conjunction
/// match distinct literals of the body of `c`, in any order.
pub fn lemma_matches(c: &Clause, lemma: &Lemma, orientation: Orientation) -> Vec<LemmaMatch> {
    matches_oriented(c, &orient(c, lemma, orientation))
}

/// Rewrites clause `id` with `lemma`. Equivalences replace the matched
/// source conjunction at its first position. An implication read left to
/// right keeps its premise and inserts the conclusion after the last matched
/// premise literal; read right to left it replaces the conclusion by the
/// premise.
pub fn apply_lemma(
    p: &Program,
    id: &str,
    lemma: &Lemma,
    orientation: Orientation,
    match_index: usize,
) -> Result<RuleOutcome, RuleError> {
    let c = target(p, id)?;
    let o = orient(c, lemma, orientation);
    let all = matches_oriented(c, &o);
    if all.is_empty() {
        return Err(RuleError::NoMatch);
    }
    let count = all.len();
    let m = all.into_iter().nth(match_index).ok_or(RuleError::MatchIndexOutOfRange { index: match_index, count })?;
    let inserted: Vec<Literal> = o.replacement.substitute(&m.substitution);
    let extend = lemma.kind == LemmaKind::Implication && orientation == Orientation::LeftToRight;
    let mut body = Vec::new();
    if extend {
        let last = *m.source_positions.iter().max().expect("nonempty lhs");
        for (i, l) in c.body.iter().enumerate() {
            body.push(l.clone());
            if i == last {
                body.extend(inserted.iter().cloned());
            }
        }
    } else {
        let first = *m.source_positions.iter().min().expect("nonempty source");
        for (i, l) in c.body.iter().enumerate() {
            if i == first {
                body.extend(inserted.iter().cloned());
            }
            if !m.source_positions.contains(&i) {
                body.push(l.clone());
            }
        }
    }
    let safety = match (lemma.kind, orientation) {
        (LemmaKind::Equivalence, _) => Safety::SemanticsPreserving,
        (LemmaKind::Implication, Orientation::LeftToRight) => Safety::LemmaConditional,
        (LemmaKind::Implication, Orientation::RightToLeft) => Safety::ThinningRisk,
    };
    let mut out = p.clone();
    out.replace(id, vec![Clause::new(id, c.head.clone(), body)]);
    out.set_provenance(id, format!("lemma {}", lemma.id));
    Ok(RuleOutcome::new(out, safety))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{clause_to_string, parse_program};
    use crate::verify::LemmaSpec;

    fn lemma(kind: LemmaKind, side: &str, lhs: &str, rhs: &str) -> Lemma {
        Lemma::from_spec(&LemmaSpec { id: "l".into(), kind, side: side.into(), lhs: lhs.into(), rhs: rhs.into() }).unwrap()
    }

    #[test]
    fn merging_equivalence_adds_order_checks() {
        let p = parse_program("m(X, Y) :- shuffle(L4, L5, Y), ord2(Y).").unwrap();
        let l = lemma(
            LemmaKind::Equivalence,
            "",
            "shuffle(Ls1, Ls2, Ls3), ord2(Ls3)",
            "ord2(Ls1), ord2(Ls2), shuffle(Ls1, Ls2, Ls3), ord2(Ls3)",
        );
        let out = apply_lemma(&p, "c1", &l, Orientation::LeftToRight, 0).unwrap();
        assert_eq!(out.safety, Safety::SemanticsPreserving);
        assert_eq!(
            clause_to_string(&out.program.clauses()[0]),
            "m(X, Y) :- ord2(L4), ord2(L5), shuffle(L4, L5, Y), ord2(Y)."
        );
    }

    #[test]
    fn implication_extends_after_premise() {
        let p = parse_program("s(X, Y) :- append(L1, [A|L2], Y), ord1(Y), t(X).").unwrap();
        let l = lemma(LemmaKind::Implication, "append(Ls1, [A|Ls2], Ls)", "ord1(Ls)", "ord1(Ls1), ord1(Ls2)");
        let out = apply_lemma(&p, "c1", &l, Orientation::LeftToRight, 0).unwrap();
        assert_eq!(out.safety, Safety::LemmaConditional);
        assert_eq!(
            clause_to_string(&out.program.clauses()[0]),
            "s(X, Y) :- append(L1, [A|L2], Y), ord1(Y), ord1(L1), ord1(L2), t(X)."
        );
    }

    #[test]
    fn implication_right_to_left_strengthens() {
        let p = parse_program("q(L) :- ord1(L).").unwrap();
        let l = lemma(LemmaKind::Implication, "", "sorted(L)", "ord1(L)");
        let out = apply_lemma(&p, "c1", &l, Orientation::RightToLeft, 0).unwrap();
        assert_eq!(out.safety, Safety::ThinningRisk);
        assert_eq!(clause_to_string(&out.program.clauses()[0]), "q(L) :- sorted(L).");
    }

    #[test]
    fn missing_side_condition_is_no_match() {
        let p = parse_program("s(Y) :- ord1(Y).").unwrap();
        let l = lemma(LemmaKind::Implication, "append(Ls1, [A|Ls2], Ls)", "ord1(Ls)", "ord1(Ls1)");
        assert_eq!(apply_lemma(&p, "c1", &l, Orientation::LeftToRight, 0), Err(RuleError::NoMatch));
    }

    #[test]
    fn lemma_variables_do_not_capture_clause_variables() {
        let p = parse_program("s(Ls2) :- perm2(Ls1, Ls2), minlist(A, Ls2).").unwrap();
        let l = lemma(LemmaKind::Equivalence, "perm2(Ls1, Ls2)", "minlist(A, Ls2)", "minlist(A, Ls1)");
        let out = apply_lemma(&p, "c1", &l, Orientation::LeftToRight, 0).unwrap();
        assert_eq!(clause_to_string(&out.program.clauses()[0]), "s(Ls2) :- perm2(Ls1, Ls2), minlist(A, Ls1).");
    }
}
