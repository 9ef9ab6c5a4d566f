use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::AbduceError;
use crate::engine::{solve, SolveLimits};
use crate::kernel::{canonical_names, literal_with_names, match_literal, Clause, Literal, Program, Substitute, Substitution, Term, Var};
use crate::rules::fold::renamed_folder;
use crate::rules::{fold, introduce_goal, FolderRef, RuleContext};

/// Scores behind the candidate order. Larger is better except for
/// `size_penalty`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateScores {
    pub enables_fold: bool,
    pub self_referential: bool,
    pub well_founded: bool,
    pub successful_path: bool,
    pub variable_coordination: i64,
    pub size_penalty: usize,
}

impl CandidateScores {
    /// Self-referential folds that do not descend are never preferred.
    pub fn demoted(&self) -> bool {
        self.self_referential && !self.well_founded
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbductiveCandidate {
    pub rank: usize,
    #[serde(skip)]
    pub literal: Literal,
    #[serde(serialize_with = "ser_subst")]
    pub substitution: Substitution,
    /// The literal printed in the naming context of the target clause.
    pub fingerprint: String,
    pub folder: FolderRef,
    pub insert_position: usize,
    /// Body positions the folder covers once the literal is inserted.
    pub fold_positions: Vec<usize>,
    pub scores: CandidateScores,
}

/// Node-count order on terms. Well-founded on ground terms and invariant
/// under renaming since it ignores variable identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WellFoundedOrder {
    pub strict: bool,
}

impl Default for WellFoundedOrder {
    fn default() -> Self {
        WellFoundedOrder { strict: true }
    }
}

impl WellFoundedOrder {
    pub fn smaller(&self, s: &Term, t: &Term) -> bool {
        if self.strict {
            s.size() < t.size()
        } else {
            s.size() <= t.size()
        }
    }
}

fn ser_subst<S: serde::Serializer>(s: &Substitution, ser: S) -> Result<S::Ok, S::Error> {
    ser.collect_str(s)
}

/// Most general instance of `l`: same predicate, distinct fresh arguments.
fn most_general(l: &Literal) -> Option<Literal> {
    let a = l.as_atom()?;
    let args = (0..a.args.len()).map(|i| Term::Var(Var::new("_", i as u32 + 1))).collect();
    Some(Literal::atom(&a.pred, args))
}

fn successful_path(p: &Program, l: &Literal, limits: SolveLimits) -> bool {
    let Some(q) = most_general(l) else {
        return false;
    };
    solve(p, &[q], limits.with_max_answers(1)).is_ok_and(|r| r.succeeded())
}

fn compare(a: &AbductiveCandidate, b: &AbductiveCandidate, order: &[FolderRef]) -> Ordering {
    let (x, y) = (&a.scores, &b.scores);
    let pos = |f: &FolderRef| order.iter().position(|g| g == f).unwrap_or(usize::MAX);
    y.enables_fold
        .cmp(&x.enables_fold)
        .then(x.demoted().cmp(&y.demoted()))
        .then(y.well_founded.cmp(&x.well_founded))
        .then(y.successful_path.cmp(&x.successful_path))
        .then(y.variable_coordination.cmp(&x.variable_coordination))
        .then(x.size_penalty.cmp(&y.size_penalty))
        .then(pos(&a.folder).cmp(&pos(&b.folder)))
        .then(a.insert_position.cmp(&b.insert_position))
        .then(a.fold_positions.cmp(&b.fold_positions))
}

/// The default folder set: every clause of the base view, then every
/// definition.
pub fn default_folders(ctx: &RuleContext<'_>) -> Vec<FolderRef> {
    use crate::rules::FolderSource;
    ctx.base
        .clauses()
        .iter()
        .map(|c| FolderRef::new(FolderSource::Base, c.id.clone()))
        .chain(ctx.definitions.clauses().iter().map(|c| FolderRef::new(FolderSource::NewDefinitions, c.id.clone())))
        .collect()
}

/// Candidate literals for clause `id`: each completes all but one body
/// literal of some folder that already matches, in order, inside the body.
/// Only candidates whose insertion makes the fold legal are kept; literals
/// already present in the body are skipped. The result is sorted best
/// first and `rank` is the index.
pub fn rank_candidates(
    p: &Program,
    ctx: &RuleContext<'_>,
    id: &str,
    folders: &[FolderRef],
    order: WellFoundedOrder,
    limits: SolveLimits,
) -> Result<Vec<AbductiveCandidate>, AbduceError> {
    let c = p.clause(id).ok_or_else(|| crate::rules::RuleError::UnknownClause(id.into()))?;
    let clause_vars: BTreeSet<Var> = c.vars().into_iter().collect();
    let mut out: Vec<AbductiveCandidate> = Vec::new();
    let mut seen = BTreeSet::new();
    for fref in folders {
        let folder = ctx.folder(p, fref)?;
        if folder.body.len() < 2 {
            continue;
        }
        let f = renamed_folder(c, folder);
        for j in 0..f.body.len() {
            let rest: Vec<Literal> = f.body.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, l)| l.clone()).collect();
            for (tpos, s) in target_matches(c, &rest) {
                let lit = f.body[j].substitute(&s);
                if c.body.contains(&lit) {
                    continue;
                }
                let insert = if j == 0 { tpos[0] } else { tpos[j - 1] + 1 };
                let mut fold_positions: Vec<usize> =
                    tpos.iter().map(|&t| if t >= insert { t + 1 } else { t }).collect();
                fold_positions.insert(j, insert);
                if fold_positions.windows(2).any(|w| w[0] >= w[1]) {
                    continue;
                }
                let Ok(introduced) = introduce_goal(p, id, lit.clone(), insert) else {
                    continue;
                };
                if fold(&introduced.program, id, Some(&fold_positions), folder, 0).is_err() {
                    continue;
                }
                let key = (fref.clone(), insert, fold_positions.clone());
                if !seen.insert(key) {
                    continue;
                }
                let mut all_vars = c.vars();
                all_vars.extend(lit.vars());
                let fingerprint = literal_with_names(&lit, &canonical_names(&all_vars));
                let head = f.head.substitute(&s);
                let self_referential = head.key() == c.head.key();
                let well_founded = head.args.iter().zip(&c.head.args).any(|(a, b)| order.smaller(a, b));
                let lv: BTreeSet<Var> = lit.vars().into_iter().collect();
                let shared = lv.iter().filter(|v| clause_vars.contains(v)).count() as i64;
                let fresh = lv.len() as i64 - shared;
                let scores = CandidateScores {
                    enables_fold: true,
                    self_referential,
                    well_founded,
                    successful_path: successful_path(p, &lit, limits),
                    variable_coordination: shared - fresh,
                    size_penalty: lit.size(),
                };
                out.push(AbductiveCandidate {
                    rank: 0,
                    literal: lit,
                    substitution: s.clone(),
                    fingerprint,
                    folder: fref.clone(),
                    insert_position: insert,
                    fold_positions,
                    scores,
                });
            }
        }
    }
    out.sort_by(|a, b| compare(a, b, folders));
    for (i, cand) in out.iter_mut().enumerate() {
        cand.rank = i;
    }
    Ok(out)
}

/// Ordered matches of `pattern` onto body literals of `c`; returns target
/// positions.
fn target_matches(c: &Clause, pattern: &[Literal]) -> Vec<(Vec<usize>, Substitution)> {
    let mut out = Vec::new();
    fn go(
        body: &[Literal],
        pattern: &[Literal],
        start: usize,
        s: Substitution,
        chosen: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, Substitution)>,
    ) {
        let Some((first, rest)) = pattern.split_first() else {
            out.push((chosen.clone(), s));
            return;
        };
        for i in start..body.len() {
            let mut s2 = s.clone();
            if match_literal(first, &body[i], &mut s2) {
                chosen.push(i);
                go(body, rest, i + 1, s2, chosen, out);
                chosen.pop();
            }
        }
    }
    go(&c.body, pattern, 0, Substitution::new(), &mut Vec::new(), &mut out);
    out
}
