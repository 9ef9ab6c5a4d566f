//! Abductive goal introduction: which literal to add to a clause body so that
//! a fold becomes possible, and how candidates are ranked.

mod complement;
mod rank;

use std::collections::BTreeSet;

use serde::Serialize;

pub use complement::{plain_complement, AbduceError, Complement};
pub use rank::{default_folders, rank_candidates, AbductiveCandidate, CandidateScores, WellFoundedOrder};

use crate::engine::{bounded_extension, EngineError, SolveLimits};
use crate::kernel::{Atom, Literal, PredKey, Program};
use crate::rules::introduce_goal;

/// Least set of predicates that have no clauses or whose every clause calls
/// a weak predicate. Builtins are never weak.
pub fn weak_predicates(p: &Program) -> BTreeSet<PredKey> {
    let mut weak: BTreeSet<PredKey> = p.mentioned_predicates().into_iter().filter(|k| !p.defines(k)).collect();
    loop {
        let grown: Vec<PredKey> = p
            .defined_predicates()
            .into_iter()
            .filter(|k| !weak.contains(k))
            .filter(|k| {
                p.clauses_for(k).all(|c| c.body.iter().any(|l| l.key().is_some_and(|lk| weak.contains(&lk))))
            })
            .collect();
        if grown.is_empty() {
            return weak;
        }
        weak.extend(grown);
    }
}

/// Advisory reading of what an introduced literal adds, judged on bounded
/// extensions of the target clause alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OccamClass {
    /// The literal already occurs in the body.
    Subsumed,
    /// The clause derives the same atoms with or without it.
    Deducible,
    /// The clause derived something before and nothing after.
    Contradictory,
    /// The literal restricts the clause without emptying it.
    Underivable,
}

const CLAUSE_PRED: &str = "$clause";

fn clause_extension(
    p: &Program,
    id: &str,
    domain: &[i64],
    max_len: usize,
    limits: SolveLimits,
) -> Result<BTreeSet<Atom>, EngineError> {
    let mut q = p.clone();
    let c = q.clause_mut(id).expect("caller checked the clause");
    c.head = Atom::new(CLAUSE_PRED, c.head.args.clone());
    let key = PredKey::new(CLAUSE_PRED, c.head.args.len());
    Ok(bounded_extension(&q, &key, domain, max_len, limits)?.atoms)
}

pub fn occam_class(
    p: &Program,
    id: &str,
    literal: &Literal,
    position: usize,
    domain: &[i64],
    max_len: usize,
    limits: SolveLimits,
) -> Result<OccamClass, AbduceError> {
    let after = introduce_goal(p, id, literal.clone(), position)?.program;
    if p.clause(id).is_some_and(|c| c.body.contains(literal)) {
        return Ok(OccamClass::Subsumed);
    }
    let ext = |q: &Program| clause_extension(q, id, domain, max_len, limits).map_err(AbduceError::Engine);
    let before = ext(p)?;
    let now = ext(&after)?;
    Ok(if before == now {
        OccamClass::Deducible
    } else if now.is_empty() && !before.is_empty() {
        OccamClass::Contradictory
    } else {
        OccamClass::Underivable
    })
}
