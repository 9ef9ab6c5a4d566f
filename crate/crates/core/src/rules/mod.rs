//! Transformation rules. Each rule maps a program to a new program and
//! reports the safety class of the step.

pub(crate) mod fold;
mod goals;
mod lemma;
mod unfold;

use serde::{Deserialize, Serialize};

pub use fold::{fold, fold_matches, FoldMatch};
pub use goals::{define, delete_clause, delete_goal, introduce_goal, rename_predicate, subsumes};
pub use lemma::{apply_lemma, lemma_matches, LemmaMatch};
pub use unfold::unfold;

use crate::kernel::{parse_literal_in, parse_program, Clause, PredKey, Program};
use crate::verify::Lemma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleKind {
    Unfold,
    Fold,
    IntroduceGoal,
    DeleteGoal,
    Define,
    ApplyLemma,
    RenamePredicate,
    DeleteClause,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Safety {
    SemanticsPreserving,
    ThinningRisk,
    WideningRisk,
    LemmaConditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FolderSource {
    Current,
    Base,
    NewDefinitions,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FolderRef {
    pub source: FolderSource,
    pub clause: String,
}

impl FolderRef {
    pub fn new(source: FolderSource, clause: impl Into<String>) -> Self {
        FolderRef { source, clause: clause.into() }
    }
}

impl std::fmt::Display for FolderRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let src = match self.source {
            FolderSource::Current => "current",
            FolderSource::Base => "base",
            FolderSource::NewDefinitions => "new_definitions",
        };
        write!(f, "{src}:{}", self.clause)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    LeftToRight,
    RightToLeft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Justification {
    Subsumed,
    UnsatisfiableBody,
    UserAsserted,
}

/// A candidate chosen by rank, with the literal it is expected to produce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRef {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folders: Option<Vec<FolderRef>>,
    pub fingerprint: String,
}

/// One transformation step in serialized form. Literal and clause parameters
/// are program text; literals are read in the naming context of the target
/// clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Step {
    Unfold {
        clause: String,
        position: usize,
    },
    Fold {
        clause: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        positions: Option<Vec<usize>>,
        folder: FolderRef,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        match_index: Option<usize>,
    },
    IntroduceGoal {
        clause: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        literal: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        position: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        candidate: Option<CandidateRef>,
    },
    DeleteGoal {
        clause: String,
        position: usize,
    },
    Define {
        clauses: Vec<String>,
    },
    ApplyLemma {
        clause: String,
        lemma: String,
        orientation: Orientation,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        match_index: Option<usize>,
    },
    RenamePredicate {
        old: String,
        new: String,
    },
    DeleteClause {
        clause: String,
        justification: Justification,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subsumer: Option<String>,
    },
}

impl Step {
    pub fn kind(&self) -> RuleKind {
        match self {
            Step::Unfold { .. } => RuleKind::Unfold,
            Step::Fold { .. } => RuleKind::Fold,
            Step::IntroduceGoal { .. } => RuleKind::IntroduceGoal,
            Step::DeleteGoal { .. } => RuleKind::DeleteGoal,
            Step::Define { .. } => RuleKind::Define,
            Step::ApplyLemma { .. } => RuleKind::ApplyLemma,
            Step::RenamePredicate { .. } => RuleKind::RenamePredicate,
            Step::DeleteClause { .. } => RuleKind::DeleteClause,
        }
    }

    /// The clause the step rewrites, when there is one.
    pub fn target_clause(&self) -> Option<&str> {
        match self {
            Step::Unfold { clause, .. }
            | Step::Fold { clause, .. }
            | Step::IntroduceGoal { clause, .. }
            | Step::DeleteGoal { clause, .. }
            | Step::ApplyLemma { clause, .. }
            | Step::DeleteClause { clause, .. } => Some(clause),
            Step::Define { .. } | Step::RenamePredicate { .. } => None,
        }
    }
}

/// A step as applied, with its safety class and any warnings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleApplication {
    pub rule: RuleKind,
    pub target_clause: Option<String>,
    pub step: Step,
    pub safety: Safety,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleOutcome {
    pub program: Program,
    pub safety: Safety,
    pub flags: Vec<String>,
}

impl RuleOutcome {
    fn new(program: Program, safety: Safety) -> Self {
        RuleOutcome { program, safety, flags: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("unknown clause {0}")]
    UnknownClause(String),
    #[error("position {index} out of range for a body of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("literal at position {0} is a builtin and cannot be unfolded")]
    BuiltinPosition(usize),
    #[error("folder body does not match the selected literals")]
    NoMatch,
    #[error("match index {index} out of range ({count} matches)")]
    MatchIndexOutOfRange { index: usize, count: usize },
    #[error("internal folder variable {0} does not map to a distinct variable local to the folded literals")]
    VariableConditionViolated(String),
    #[error("fold would reproduce the clause head in its own body")]
    SelfFoldWithoutRecursionGuard,
    #[error("predicate {0} is already defined")]
    PredicateAlreadyDefined(String),
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("unknown lemma {0}")]
    UnknownLemma(String),
    #[error("clause {clause} is not subsumed by {subsumer}")]
    SubsumptionCheckFailed { clause: String, subsumer: String },
    #[error("could not show that the body of {0} is unsatisfiable")]
    UnsatisfiabilityNotShown(String),
    #[error("no folder clause {0}")]
    UnknownFolder(String),
    #[error("syntax error in step parameter: {0}")]
    Syntax(String),
    #[error("introduce_goal needs a literal and a position")]
    UnresolvedCandidate,
    #[error("definition must not be empty")]
    EmptyDefinition,
    #[error("arity mismatch renaming {old} to {new}")]
    ArityMismatch { old: String, new: String },
}

/// Where folder clauses and lemmas are looked up.
#[derive(Debug, Clone, Copy)]
pub struct RuleContext<'a> {
    /// The base program with later predicate renames applied.
    pub base: &'a Program,
    pub definitions: &'a Program,
    pub lemmas: &'a [Lemma],
}

impl<'a> RuleContext<'a> {
    pub fn folder(&self, current: &'a Program, r: &FolderRef) -> Result<&'a Clause, RuleError> {
        let p = match r.source {
            FolderSource::Current => current,
            FolderSource::Base => self.base,
            FolderSource::NewDefinitions => self.definitions,
        };
        p.clause(&r.clause).ok_or_else(|| RuleError::UnknownFolder(r.to_string()))
    }

    pub fn lemma(&self, id: &str) -> Result<&'a Lemma, RuleError> {
        self.lemmas.iter().find(|l| l.id == id).ok_or_else(|| RuleError::UnknownLemma(id.into()))
    }
}

fn target<'p>(p: &'p Program, id: &str) -> Result<&'p Clause, RuleError> {
    p.clause(id).ok_or_else(|| RuleError::UnknownClause(id.into()))
}

fn pred_key(s: &str) -> Result<PredKey, RuleError> {
    PredKey::parse(s).ok_or_else(|| RuleError::Syntax(format!("expected name/arity, found `{s}`")))
}

/// Applies a fully resolved step. Introduced literals must be given
/// explicitly; candidate selection happens in the derivation layer.
pub fn apply_step(p: &Program, step: &Step, ctx: &RuleContext<'_>) -> Result<RuleOutcome, RuleError> {
    match step {
        Step::Unfold { clause, position } => unfold(p, clause, *position),
        Step::Fold { clause, positions, folder, match_index } => {
            let f = ctx.folder(p, folder)?;
            fold(p, clause, positions.as_deref(), f, match_index.unwrap_or(0))
        }
        Step::IntroduceGoal { clause, literal, position, .. } => {
            let (Some(text), Some(pos)) = (literal, position) else {
                return Err(RuleError::UnresolvedCandidate);
            };
            let c = target(p, clause)?;
            let lit = parse_literal_in(c, text).map_err(|e| RuleError::Syntax(e.to_string()))?;
            introduce_goal(p, clause, lit, *pos)
        }
        Step::DeleteGoal { clause, position } => delete_goal(p, clause, *position),
        Step::Define { clauses } => {
            let text = clauses.join("\n");
            let parsed = parse_program(&text).map_err(|e| RuleError::Syntax(e.to_string()))?;
            define(p, parsed.clauses().to_vec())
        }
        Step::ApplyLemma { clause, lemma, orientation, match_index } => {
            let l = ctx.lemma(lemma)?;
            apply_lemma(p, clause, l, *orientation, match_index.unwrap_or(0))
        }
        Step::RenamePredicate { old, new } => rename_predicate(p, &pred_key(old)?, &pred_key(new)?),
        Step::DeleteClause { clause, justification, subsumer } => {
            delete_clause(p, clause, *justification, subsumer.as_deref())
        }
    }
}

fn check_index(index: usize, len: usize) -> Result<(), RuleError> {
    if index < len {
        Ok(())
    } else {
        Err(RuleError::IndexOutOfRange { index, len })
    }
}
