use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::lemma::{Lemma, LemmaKind};
use crate::engine::{
    bounded_extension, cartesian, decide, ground_values, infer_signature, EngineError, SolveLimits, Solver,
};
use crate::kernel::{
    literal_to_string, term_to_string, vars_of, Atom, Clause, Literal, PredKey, Program, Substitute, Substitution, Term,
};

const LEMMA_PRED: &str = "$lemma";
/// Counterexamples kept per failing lemma.
const MAX_COUNTEREXAMPLES: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LemmaVerdict {
    Holds { instances: usize },
    Fails { counterexamples: Vec<String>, total: usize },
}

impl LemmaVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, LemmaVerdict::Holds { .. })
    }
}

fn all_hold(solver: &Solver, lits: &[Literal], limits: SolveLimits) -> Result<bool, EngineError> {
    if lits.is_empty() {
        return Ok(true);
    }
    decide(solver, lits, limits)
}

/// Checks `lemma` on every ground instance over the bounds. Lists range over
/// `domain` up to `max_list_len`; other variables range over `domain`.
pub fn check_lemma(
    lemma: &Lemma,
    p: &Program,
    domain: &[i64],
    max_list_len: usize,
    limits: SolveLimits,
) -> Result<LemmaVerdict, EngineError> {
    limits.validate()?;
    let lits: Vec<Literal> = lemma.literals().cloned().collect();
    let vars = vars_of(&lits);
    // Kinds of lemma variables come from a probe clause over the lemma body.
    let mut probe = p.clone();
    let head = Atom { pred: LEMMA_PRED.into(), args: vars.iter().cloned().map(Term::Var).collect() };
    probe
        .push(Clause::new(probe.fresh_id("$lemma"), head, lits))
        .expect("fresh id");
    let sig = infer_signature(&probe);
    let kinds = sig.of(&PredKey::new(LEMMA_PRED, vars.len()));
    let slots: Vec<Vec<Term>> = kinds.into_iter().map(|k| ground_values(k, domain, max_list_len, false)).collect();
    let instances = cartesian(&slots);
    let solver = Solver::new(p);
    let check = |values: &Vec<Term>| -> Result<Option<Substitution>, EngineError> {
        let s = Substitution::simultaneous(vars.iter().cloned().zip(values.iter().cloned()));
        if !all_hold(&solver, &lemma.side_conditions.substitute(&s), limits)? {
            return Ok(None);
        }
        let lhs = all_hold(&solver, &lemma.lhs.substitute(&s), limits)?;
        let ok = match lemma.kind {
            LemmaKind::Implication => !lhs || all_hold(&solver, &lemma.rhs.substitute(&s), limits)?,
            LemmaKind::Equivalence => lhs == all_hold(&solver, &lemma.rhs.substitute(&s), limits)?,
        };
        Ok((!ok).then_some(s))
    };
    let results: Vec<Result<Option<Substitution>, EngineError>> = instances.par_iter().map(check).collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(s) = r? {
            failures.push(s);
        }
    }
    if failures.is_empty() {
        return Ok(LemmaVerdict::Holds { instances: instances.len() });
    }
    let total = failures.len();
    let counterexamples = failures
        .iter()
        .take(MAX_COUNTEREXAMPLES)
        .map(|s| s.iter().map(|(v, t)| format!("{v} = {}", term_to_string(t))).collect::<Vec<_>>().join(", "))
        .collect();
    Ok(LemmaVerdict::Fails { counterexamples, total })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiffVerdict {
    Equal,
    Thinned,
    Widened,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionDiff {
    pub predicate: PredKey,
    pub verdict: DiffVerdict,
    /// In the first extension only.
    pub missing: BTreeSet<Atom>,
    /// In the second extension only.
    pub extra: BTreeSet<Atom>,
    /// The second extension is empty while the first is not.
    pub imploded: bool,
}

impl ExtensionDiff {
    pub fn from_sets(predicate: PredKey, before: &BTreeSet<Atom>, after: &BTreeSet<Atom>) -> Self {
        let missing: BTreeSet<Atom> = before.difference(after).cloned().collect();
        let extra: BTreeSet<Atom> = after.difference(before).cloned().collect();
        let verdict = match (missing.is_empty(), extra.is_empty()) {
            (true, true) => DiffVerdict::Equal,
            (false, true) => DiffVerdict::Thinned,
            (true, false) => DiffVerdict::Widened,
            (false, false) => DiffVerdict::Mixed,
        };
        ExtensionDiff { predicate, verdict, missing, extra, imploded: after.is_empty() && !before.is_empty() }
    }

    pub fn is_equal(&self) -> bool {
        self.verdict == DiffVerdict::Equal
    }

    /// One line per differing atom, `-` for missing and `+` for extra.
    pub fn render(&self) -> String {
        let mut out = format!("{:?} on {}\n", self.verdict, self.predicate);
        for a in &self.missing {
            let _ = writeln!(out, "- {}", literal_to_string(&Literal::Atom(a.clone())));
        }
        for a in &self.extra {
            let _ = writeln!(out, "+ {}", literal_to_string(&Literal::Atom(a.clone())));
        }
        out
    }
}

/// Compares the bounded extensions of `pred` in two programs.
pub fn compare_extensions(
    before: &Program,
    after: &Program,
    pred: &PredKey,
    domain: &[i64],
    max_list_len: usize,
    limits: SolveLimits,
) -> Result<ExtensionDiff, EngineError> {
    let a = bounded_extension(before, pred, domain, max_list_len, limits)?;
    let b = bounded_extension(after, pred, domain, max_list_len, limits)?;
    Ok(ExtensionDiff::from_sets(pred.clone(), &a.atoms, &b.atoms))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub n: usize,
    pub steps: u64,
    pub answers: usize,
    /// A limit was hit before the first answer.
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepProfile {
    pub program: String,
    pub predicate: String,
    pub rows: Vec<ProfileRow>,
}

impl StepProfile {
    pub fn steps(&self, n: usize) -> Option<u64> {
        self.rows.iter().find(|r| r.n == n && !r.censored).map(|r| r.steps)
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{} ({})\n{:>4}  {:>12}  {:>7}\n", self.program, self.predicate, "n", "steps", "answers");
        for r in &self.rows {
            let mark = if r.censored { "  censored" } else { "" };
            let _ = writeln!(out, "{:>4}  {:>12}  {:>7}{mark}", r.n, r.steps, r.answers);
        }
        out
    }
}

/// The reversed input `[n, n-1, .., 1]`.
pub fn reversed_input(n: usize) -> Term {
    Term::list((1..=n as i64).rev().map(Term::int))
}

/// Steps to the first answer of `pred([n..1], X)` for each size.
pub fn step_profile(p: &Program, pred: &str, sizes: &[usize], limits: SolveLimits) -> Result<StepProfile, EngineError> {
    limits.validate()?;
    let solver = Solver::new(p);
    let mut rows = Vec::with_capacity(sizes.len());
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for n in sorted {
        let q = Literal::Atom(Atom { pred: pred.into(), args: vec![reversed_input(n), Term::var("X")] });
        let r = solver.solve(&[q], limits.with_max_answers(1))?;
        let censored = r.answers.is_empty() && !r.exhausted;
        rows.push(ProfileRow { n, steps: r.steps, answers: r.answers.len(), censored });
    }
    Ok(StepProfile { program: p.name.clone(), predicate: format!("{pred}/2"), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_literal, parse_program};
    use crate::rules::introduce_goal;
    use crate::verify::LemmaSpec;

    const NAIVE: &str = "\
sort(Ls1, Ls2) :- perm1(Ls1, Ls2), ord1(Ls2).
perm1([], []).
perm1([A|Ls1], Ls3) :- perm1(Ls1, Ls2), insert(A, Ls2, Ls3).
insert(A, Ls, [A|Ls]).
insert(A, [B|Ls1], [B|Ls2]) :- insert(A, Ls1, Ls2).
ord1([]).
ord1([A]).
ord1([A, B|Ls]) :- A =< B, ord1([B|Ls]).
minlist(A, []).
minlist(A, [B|Ls]) :- A =< B, minlist(A, Ls).
";

    fn lemma(kind: LemmaKind, side: &str, lhs: &str, rhs: &str) -> Lemma {
        Lemma::from_spec(&LemmaSpec { id: "t".into(), kind, side: side.into(), lhs: lhs.into(), rhs: rhs.into() }).unwrap()
    }

    #[test]
    fn insert_lemma_holds() {
        let p = parse_program(NAIVE).unwrap();
        let l = lemma(LemmaKind::Implication, "", "insert(A, Ls1, Ls2), ord1(Ls2)", "ord1(Ls1)");
        let v = check_lemma(&l, &p, &[0, 1, 2], 3, SolveLimits::default()).unwrap();
        assert!(v.holds(), "{v:?}");
    }

    #[test]
    fn corrupted_lemma_fails_with_counterexample() {
        let p = parse_program(NAIVE).unwrap();
        let l = lemma(LemmaKind::Implication, "", "ord1([A|Ls])", "minlist(A, Ls)");
        assert!(check_lemma(&l, &p, &[0, 1], 2, SolveLimits::default()).unwrap().holds());
        let bad = lemma(LemmaKind::Implication, "", "ord1([A, B|Ls])", "minlist(B, [A])");
        match check_lemma(&bad, &p, &[0, 1], 2, SolveLimits::default()).unwrap() {
            LemmaVerdict::Fails { counterexamples, total } => {
                assert!(total > 0);
                assert!(!counterexamples[0].is_empty());
            }
            v => panic!("expected failure, got {v:?}"),
        }
    }

    #[test]
    fn self_comparison_is_equal() {
        let p = parse_program(NAIVE).unwrap();
        let d = compare_extensions(&p, &p, &PredKey::new("sort", 2), &[0, 1], 2, SolveLimits::default()).unwrap();
        assert!(d.is_equal());
        assert!(!d.imploded);
    }

    #[test]
    fn unsatisfiable_goal_implodes_and_swap_widens() {
        let p = parse_program(NAIVE).unwrap();
        let thin = introduce_goal(&p, "c1", parse_literal("1 < 0").unwrap(), 0).unwrap().program;
        let key = PredKey::new("sort", 2);
        let d = compare_extensions(&p, &thin, &key, &[0, 1], 2, SolveLimits::default()).unwrap();
        assert_eq!(d.verdict, DiffVerdict::Thinned);
        assert!(d.imploded);
        let back = compare_extensions(&thin, &p, &key, &[0, 1], 2, SolveLimits::default()).unwrap();
        assert_eq!(back.verdict, DiffVerdict::Widened);
        assert_eq!(back.extra, d.missing);
    }

    #[test]
    fn profile_rows_are_sorted() {
        let p = parse_program(NAIVE).unwrap();
        let prof = step_profile(&p, "sort", &[3, 0, 1, 2], SolveLimits::default()).unwrap();
        assert_eq!(prof.rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert!(prof.rows.iter().all(|r| r.steps > 0 && r.answers == 1 && !r.censored));
        assert!(prof.rows.windows(2).all(|w| w[0].steps < w[1].steps));
        assert!(prof.to_table().lines().count() == 6);
    }
}
