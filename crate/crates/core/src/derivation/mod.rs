//! Derivation sessions and replayable scripts.

mod script;
mod session;

use std::collections::BTreeSet;

pub use script::{Replay, Script};
pub use session::{AuditConfig, Session, SessionError, Snapshot};

use crate::kernel::{alpha_equivalent_programs, parse_program, PredKey, Program};
use crate::verify::Lemma;

/// Where scripts find named programs and lemmas.
pub trait Resolver {
    fn program(&self, name: &str) -> Option<Program>;
    fn lemmas(&self) -> Vec<Lemma>;
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReplayError {
    #[error("cannot resolve program `{0}`")]
    Unresolved(String),
    #[error("step {index}: {source}")]
    Step { index: usize, source: SessionError },
}

/// Predicates reachable from `root` through clause bodies, `root` included.
pub fn reachable(p: &Program, root: &PredKey) -> BTreeSet<PredKey> {
    let mut seen = BTreeSet::from([root.clone()]);
    let mut todo = vec![root.clone()];
    while let Some(k) = todo.pop() {
        for c in p.clauses_for(&k) {
            for k2 in c.body.iter().filter_map(|l| l.key()) {
                if seen.insert(k2.clone()) {
                    todo.push(k2);
                }
            }
        }
    }
    seen
}

/// Names resolve through `r`; anything that is not a plain name is read
/// as program text.
pub fn resolve_program(r: &dyn Resolver, base: &str) -> Result<Program, ReplayError> {
    let is_name = !base.is_empty() && base.chars().all(|c| c.is_alphanumeric() || c == '_');
    if is_name {
        return r.program(base).ok_or_else(|| ReplayError::Unresolved(base.to_string()));
    }
    parse_program(base).map_err(|_| ReplayError::Unresolved(base.to_string()))
}

/// Replays `script` in a fresh session.
pub fn replay(script: &Script, r: &dyn Resolver, verify_now: bool) -> Result<(Session, Replay), ReplayError> {
    let base = resolve_program(r, &script.base)?;
    let mut session = Session::new(script.name.clone(), base, r.lemmas());
    for (index, step) in script.steps.iter().enumerate() {
        session.apply(step, verify_now).map_err(|source| ReplayError::Step { index, source })?;
    }
    let matches_expected = match &script.expected_final {
        Some(name) => Some(matches(&session, &resolve_program(r, name)?)),
        None => None,
    };
    let out = Replay { final_program: session.program().clone(), log: session.applications(), matches_expected };
    Ok((session, out))
}

/// The final program, restricted to what the root predicate calls, is
/// alpha-equivalent to `expected`.
pub fn matches(session: &Session, expected: &Program) -> bool {
    let s = session.current();
    let derived = match &s.root {
        Some(root) => s.program.restrict_to(&reachable(&s.program, root)),
        None => s.program.clone(),
    };
    alpha_equivalent_programs(&derived, expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{clause_to_string, program_to_string};
    use crate::rules::{CandidateRef, FolderRef, FolderSource, Step};

    const NAIVE: &str = "sort(Ls1, Ls2) :- perm1(Ls1, Ls2), ord1(Ls2).\n\
        perm1([], []).\n\
        perm1([A|Ls1], Ls3) :- perm1(Ls1, Ls2), insert(A, Ls2, Ls3).\n\
        insert(A, Ls, [A|Ls]).\n\
        insert(A, [B|Ls1], [B|Ls2]) :- insert(A, Ls1, Ls2).\n\
        ord1([]).\n\
        ord1([A]).\n\
        ord1([A, B|Ls]) :- A =< B, ord1([B|Ls]).";

    struct Inline;
    impl Resolver for Inline {
        fn program(&self, name: &str) -> Option<Program> {
            (name == "naive").then(|| parse_program(NAIVE).unwrap())
        }
        fn lemmas(&self) -> Vec<Lemma> {
            Vec::new()
        }
    }

    fn ts_steps() -> Vec<Step> {
        vec![
            Step::RenamePredicate { old: "sort/2".into(), new: "sort_TS/2".into() },
            Step::Unfold { clause: "c1".into(), position: 0 },
            Step::Unfold { clause: "c1.1".into(), position: 0 },
            Step::IntroduceGoal {
                clause: "c1.2".into(),
                literal: None,
                position: None,
                candidate: Some(CandidateRef { rank: 0, folders: None, fingerprint: "ord1(Ls2)".into() }),
            },
            Step::Fold {
                clause: "c1.2".into(),
                positions: Some(vec![0, 1]),
                folder: FolderRef::new(FolderSource::Base, "c1"),
                match_index: None,
            },
        ]
    }

    #[test]
    fn tamaki_sato_kernel() {
        let script = Script { name: "ts".into(), base: "naive".into(), steps: ts_steps(), expected_final: None };
        let (s, r) = replay(&script, &Inline, true).unwrap();
        assert_eq!(
            clause_to_string(r.final_program.clause("c1.2").unwrap()),
            "sort_TS([A|Ls1], Ls3) :- sort_TS(Ls1, Ls2), insert(A, Ls2, Ls3), ord1(Ls3)."
        );
        for snap in &s.history()[1..] {
            let d = snap.diff.as_ref().expect("audited");
            assert!(d.is_equal(), "{:?}", snap.application);
        }
    }

    #[test]
    fn branch_conflict_after_undo() {
        let mut s = Session::new("t", parse_program(NAIVE).unwrap(), Vec::new());
        let step = Step::Unfold { clause: "c1".into(), position: 0 };
        s.apply(&step, false).unwrap();
        let next = s.program().clone();
        assert!(s.undo());
        assert_eq!(s.apply(&step, false).unwrap_err(), SessionError::BranchConflict);
        assert!(s.redo());
        assert_eq!(s.program(), &next);
        s.undo();
        s.truncate();
        assert_eq!(s.apply(&step, false).unwrap().program, next);
    }

    #[test]
    fn export_replays_identically() {
        let script = Script { name: "ts".into(), base: "naive".into(), steps: ts_steps(), expected_final: None };
        let (s, r) = replay(&script, &Inline, false).unwrap();
        let exported = s.export_script("ts", "naive", None);
        let (s2, r2) = replay(&exported, &Inline, false).unwrap();
        assert_eq!(program_to_string(&r.final_program), program_to_string(&r2.final_program));
        assert_eq!(exported, s2.export_script("ts", "naive", None));
        assert_eq!(Script::from_json(&exported.to_json()).unwrap(), exported);
    }

    #[test]
    fn fresh_and_empty() {
        let s = Session::new("e", Program::new("empty"), Vec::new());
        assert_eq!(s.history().len(), 1);
        assert!(s.export_script("e", "", None).steps.is_empty());
        let script = Script { name: "n".into(), base: "naive".into(), steps: vec![], expected_final: None };
        assert_eq!(replay(&script, &Inline, false).unwrap().1.final_program, parse_program(NAIVE).unwrap());
    }

    #[test]
    fn fingerprint_drift_is_loud() {
        let mut steps = ts_steps();
        if let Step::IntroduceGoal { candidate: Some(c), .. } = &mut steps[3] {
            c.fingerprint = "ord1(Ls3)".into();
        }
        let script = Script { name: "ts".into(), base: "naive".into(), steps, expected_final: None };
        let err = replay(&script, &Inline, false).unwrap_err();
        assert!(matches!(err, ReplayError::Step { index: 3, source: SessionError::CandidateDrift { .. } }));
    }
}
