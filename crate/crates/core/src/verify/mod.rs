//! Bounded semantic checks: lemmas, extension comparison and step profiles.

mod check;
mod lemma;

pub use check::{
    check_lemma, compare_extensions, reversed_input, step_profile, DiffVerdict, ExtensionDiff, LemmaVerdict, ProfileRow,
    StepProfile,
};
pub use lemma::{Lemma, LemmaError, LemmaKind, LemmaSpec};
