use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::signature::{infer_signature, ArgKind, Signature};
use super::solve::{EngineError, SolveLimits, Solver};
use crate::kernel::{literal_to_string, Atom, Literal, PredKey, Program, Term};

/// Ground instances of one predicate that succeed within the bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelSummary {
    pub predicate: PredKey,
    pub domain: Vec<i64>,
    pub max_list_len: usize,
    pub atoms: BTreeSet<Atom>,
}

impl ModelSummary {
    pub fn atom_strings(&self) -> Vec<String> {
        self.atoms.iter().map(|a| literal_to_string(&Literal::Atom(a.clone()))).collect()
    }
}

/// Every int list over `domain` of length at most `max_len`, shortest first,
/// each length in lexicographic order of the domain.
pub fn ground_lists(domain: &[i64], max_len: usize) -> Vec<Term> {
    let mut out = vec![Term::nil()];
    let mut layer: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * domain.len());
        for xs in &layer {
            for &d in domain {
                let mut ys = xs.clone();
                ys.push(d);
                next.push(ys);
            }
        }
        out.extend(next.iter().map(|xs| Term::int_list(xs)));
        layer = next;
    }
    out
}

/// The ground values a slot of the given kind ranges over.
pub fn ground_values(kind: ArgKind, domain: &[i64], max_len: usize, neg_inf: bool) -> Vec<Term> {
    match kind {
        ArgKind::List => ground_lists(domain, max_len),
        ArgKind::Int | ArgKind::Unknown => {
            let mut v: Vec<Term> = Vec::new();
            if neg_inf {
                v.push(Term::Const(crate::kernel::Constant::NegInf));
            }
            v.extend(domain.iter().map(|&d| Term::int(d)));
            v
        }
    }
}

/// Cartesian product of per-slot value lists, first slot varying slowest.
pub fn cartesian(slots: &[Vec<Term>]) -> Vec<Vec<Term>> {
    let mut out: Vec<Vec<Term>> = vec![vec![]];
    for vals in slots {
        let mut next = Vec::with_capacity(out.len() * vals.len());
        for prefix in &out {
            for v in vals {
                let mut row = prefix.clone();
                row.push(v.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// All ground instances of `pred` over the bounds, in enumeration order.
pub fn ground_instances(sig: &Signature, pred: &PredKey, domain: &[i64], max_len: usize) -> Vec<Atom> {
    let slots: Vec<Vec<Term>> = sig
        .of(pred)
        .into_iter()
        .map(|k| ground_values(k, domain, max_len, sig.uses_neg_inf))
        .collect();
    cartesian(&slots).into_iter().map(|args| Atom { pred: pred.name.clone(), args }).collect()
}

/// Decides each ground query; `Ok(true)` iff it has an answer.
pub(crate) fn decide(solver: &Solver, query: &[Literal], limits: SolveLimits) -> Result<bool, EngineError> {
    let r = solver.solve(query, limits.with_max_answers(1))?;
    if r.succeeded() {
        Ok(true)
    } else if r.exhausted {
        Ok(false)
    } else {
        Err(EngineError::LimitExceeded { query: query.iter().map(literal_to_string).collect::<Vec<_>>().join(", ") })
    }
}

/// The ground atoms of `pred` within the bounds for which solve succeeds.
/// Queries run in parallel; the result is independent of scheduling.
pub fn bounded_extension(
    p: &Program,
    pred: &PredKey,
    domain: &[i64],
    max_list_len: usize,
    limits: SolveLimits,
) -> Result<ModelSummary, EngineError> {
    limits.validate()?;
    if !p.defines(pred) && !p.mentioned_predicates().contains(pred) {
        return Err(EngineError::UndefinedPredicate(pred.to_string()));
    }
    let sig = infer_signature(p);
    let solver = Solver::new(p);
    let candidates = ground_instances(&sig, pred, domain, max_list_len);
    let verdicts: Vec<Result<bool, EngineError>> = candidates
        .par_iter()
        .map(|a| decide(&solver, &[Literal::Atom(a.clone())], limits))
        .collect();
    let mut atoms = BTreeSet::new();
    for (a, v) in candidates.into_iter().zip(verdicts) {
        if v? {
            atoms.insert(a);
        }
    }
    let mut domain = domain.to_vec();
    domain.sort_unstable();
    domain.dedup();
    Ok(ModelSummary { predicate: pred.clone(), domain, max_list_len, atoms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse_program;

    const ORD1: &str = "ord1([]).\nord1([A]).\nord1([A, B|Ls]) :- A =< B, ord1([B|Ls]).";

    #[test]
    fn ord1_extension_over_two_values() {
        let p = parse_program(ORD1).unwrap();
        let m = bounded_extension(&p, &PredKey::new("ord1", 1), &[0, 1], 2, SolveLimits::default()).unwrap();
        assert_eq!(m.atom_strings(), vec!["ord1([])", "ord1([0])", "ord1([0, 0])", "ord1([0, 1])", "ord1([1])", "ord1([1, 1])"]);
    }

    #[test]
    fn empty_domain_leaves_only_nil() {
        let p = parse_program(ORD1).unwrap();
        let m = bounded_extension(&p, &PredKey::new("ord1", 1), &[], 0, SolveLimits::default()).unwrap();
        assert_eq!(m.atom_strings(), vec!["ord1([])"]);
    }

    #[test]
    fn nonterminating_query_is_reported() {
        let p = parse_program("loop(X) :- loop(X).").unwrap();
        let e = bounded_extension(&p, &PredKey::new("loop", 1), &[0], 0, SolveLimits::default().with_max_steps(100));
        assert!(matches!(e, Err(EngineError::LimitExceeded { .. })));
    }

    #[test]
    fn list_enumeration_counts() {
        assert_eq!(ground_lists(&[0, 1, 2], 4).len(), 121);
        assert_eq!(ground_lists(&[0, 1], 3).len(), 15);
    }
}
