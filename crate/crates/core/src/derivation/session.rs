use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Script;
use crate::abduce::{default_folders, rank_candidates, AbduceError, AbductiveCandidate, WellFoundedOrder};
use crate::engine::{bounded_extension, EngineError, SolveLimits};
use crate::kernel::{Atom, PredKey, Program};
use crate::rules::{apply_step, FolderRef, RuleApplication, RuleContext, RuleError, Step};
use crate::verify::{ExtensionDiff, Lemma};

/// Bounds used when a step is audited.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub domain: Vec<i64>,
    pub max_list_len: usize,
    pub limits: SolveLimits,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            domain: vec![0, 1],
            max_list_len: 3,
            limits: SolveLimits { max_depth: 2_000, max_steps: 200_000, max_answers: usize::MAX },
        }
    }
}

/// Everything a later step may refer to, frozen after each step.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub program: Program,
    /// The base program with the renames applied so far; base folders come
    /// from here.
    pub base_view: Program,
    pub definitions: Program,
    /// The predicate being derived, followed through renames.
    pub root: Option<PredKey>,
    pub application: Option<RuleApplication>,
    pub diff: Option<ExtensionDiff>,
    pub audit_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("cursor is not at the end of the history; undo history would be overwritten")]
    BranchConflict,
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Abduce(#[from] AbduceError),
    #[error("candidate rank {rank} is `{found}`, expected `{expected}`")]
    CandidateDrift { rank: usize, expected: String, found: String },
    #[error("no candidate at rank {rank} ({count} candidates)")]
    CandidateMissing { rank: usize, count: usize },
    #[error("{0}")]
    Engine(#[from] EngineError),
}

/// A linear derivation history with a cursor. Snapshots are never mutated;
/// applying a step appends one.
#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    base: Program,
    lemmas: Vec<Lemma>,
    history: Vec<Snapshot>,
    cursor: usize,
    pub audit: AuditConfig,
}

impl Session {
    /// The root is the head predicate of the first base clause.
    pub fn new(id: impl Into<String>, base: Program, lemmas: Vec<Lemma>) -> Session {
        let root = base.clauses().first().map(|c| c.key());
        let first = Snapshot {
            program: base.clone(),
            base_view: base.clone(),
            definitions: Program::new("definitions"),
            root,
            application: None,
            diff: None,
            audit_error: None,
        };
        Session { id: id.into(), base, lemmas, history: vec![first], cursor: 0, audit: AuditConfig::default() }
    }

    pub fn base(&self) -> &Program {
        &self.base
    }

    pub fn lemmas(&self) -> &[Lemma] {
        &self.lemmas
    }

    pub fn history(&self) -> &[Snapshot] {
        &self.history
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn current(&self) -> &Snapshot {
        &self.history[self.cursor]
    }

    pub fn program(&self) -> &Program {
        &self.current().program
    }

    /// Applications from the base up to the cursor.
    pub fn applications(&self) -> Vec<RuleApplication> {
        self.history[1..=self.cursor].iter().filter_map(|s| s.application.clone()).collect()
    }

    pub fn undo(&mut self) -> bool {
        if self.cursor == 0 {
            return false;
        }
        self.cursor -= 1;
        true
    }

    pub fn redo(&mut self) -> bool {
        if self.cursor + 1 >= self.history.len() {
            return false;
        }
        self.cursor += 1;
        true
    }

    /// Drops the snapshots after the cursor, making the cursor the end.
    pub fn truncate(&mut self) {
        self.history.truncate(self.cursor + 1);
    }

    /// Ranked goal-introduction candidates for clause `id` in the current
    /// state. Without explicit folders every base-view clause and every
    /// definition is tried.
    pub fn candidates(
        &self,
        id: &str,
        folders: Option<&[FolderRef]>,
        limits: SolveLimits,
    ) -> Result<Vec<AbductiveCandidate>, SessionError> {
        let s = self.current();
        let ctx = RuleContext { base: &s.base_view, definitions: &s.definitions, lemmas: &self.lemmas };
        let defaults;
        let folders = match folders {
            Some(f) => f,
            None => {
                defaults = default_folders(&ctx);
                &defaults
            }
        };
        Ok(rank_candidates(&s.program, &ctx, id, folders, WellFoundedOrder::default(), limits)?)
    }

    /// Fills in the literal and position of a candidate-based goal
    /// introduction, checking the recorded fingerprint.
    pub fn resolve(&self, step: &Step) -> Result<Step, SessionError> {
        let Step::IntroduceGoal { clause, candidate: Some(cand), .. } = step else {
            return Ok(step.clone());
        };
        let ranked = self.candidates(clause, cand.folders.as_deref(), SolveLimits::default())?;
        let count = ranked.len();
        let chosen = ranked.into_iter().nth(cand.rank).ok_or(SessionError::CandidateMissing { rank: cand.rank, count })?;
        if chosen.fingerprint != cand.fingerprint {
            return Err(SessionError::CandidateDrift {
                rank: cand.rank,
                expected: cand.fingerprint.clone(),
                found: chosen.fingerprint,
            });
        }
        Ok(Step::IntroduceGoal {
            clause: clause.clone(),
            literal: Some(chosen.fingerprint),
            position: Some(chosen.insert_position),
            candidate: Some(cand.clone()),
        })
    }

    /// Applies `step` at the end of the history. With `verify_now` the root
    /// predicate's bounded extension is compared before and after.
    pub fn apply(&mut self, step: &Step, verify_now: bool) -> Result<&Snapshot, SessionError> {
        if self.cursor + 1 != self.history.len() {
            return Err(SessionError::BranchConflict);
        }
        let step = self.resolve(step)?;
        let s = self.current();
        let ctx = RuleContext { base: &s.base_view, definitions: &s.definitions, lemmas: &self.lemmas };
        let outcome = apply_step(&s.program, &step, &ctx)?;
        let mut base_view = s.base_view.clone();
        let mut definitions = s.definitions.clone();
        let mut root = s.root.clone();
        match &step {
            Step::RenamePredicate { old, new } => {
                let (old, new) = (PredKey::parse(old).expect("checked by rule"), PredKey::parse(new).expect("checked by rule"));
                if let Ok(o) = crate::rules::rename_predicate(&base_view, &old, &new) {
                    base_view = o.program;
                }
                if let Ok(o) = crate::rules::rename_predicate(&definitions, &old, &new) {
                    definitions = o.program;
                }
                if root.as_ref() == Some(&old) {
                    root = Some(new);
                }
            }
            Step::Define { .. } => {
                for c in outcome.program.clauses().iter().filter(|c| !s.program.contains_id(&c.id)) {
                    definitions.push(c.clone()).expect("define produces fresh ids");
                }
            }
            _ => {}
        }
        let application = RuleApplication {
            rule: step.kind(),
            target_clause: step.target_clause().map(str::to_string),
            step: step.clone(),
            safety: outcome.safety,
            flags: outcome.flags.clone(),
        };
        let (diff, audit_error) = match (&root, verify_now) {
            (Some(r), true) => match self.audit_root(&s.program, s.root.as_ref().unwrap_or(r), &outcome.program, r) {
                Ok(d) => (Some(d), None),
                Err(e) => (None, Some(e.to_string())),
            },
            _ => (None, None),
        };
        self.history.push(Snapshot {
            program: outcome.program,
            base_view,
            definitions,
            root,
            application: Some(application),
            diff,
            audit_error,
        });
        self.cursor += 1;
        Ok(&self.history[self.cursor])
    }

    fn audit_root(&self, before: &Program, k0: &PredKey, after: &Program, k1: &PredKey) -> Result<ExtensionDiff, EngineError> {
        let a = &self.audit;
        let e0 = bounded_extension(before, k0, &a.domain, a.max_list_len, a.limits)?.atoms;
        let e1: BTreeSet<Atom> = bounded_extension(after, k1, &a.domain, a.max_list_len, a.limits)?
            .atoms
            .into_iter()
            .map(|x| Atom { pred: k0.name.clone(), args: x.args })
            .collect();
        Ok(ExtensionDiff::from_sets(k1.clone(), &e0, &e1))
    }

    /// The steps up to the cursor as a script.
    pub fn export_script(&self, name: &str, base: &str, expected_final: Option<String>) -> Script {
        Script {
            name: name.to_string(),
            base: base.to_string(),
            steps: self.applications().into_iter().map(|a| a.step).collect(),
            expected_final,
        }
    }
}
