use serde::{Deserialize, Serialize};

use crate::kernel::{parse_query, var_set, Literal, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaKind {
    Equivalence,
    Implication,
}

/// `side ⊢ lhs ⟹ rhs`, or `lhs ≡ rhs` under `side` for equivalences.
/// Variables are universally quantified over the whole lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma {
    pub id: String,
    pub side_conditions: Vec<Literal>,
    pub lhs: Vec<Literal>,
    pub rhs: Vec<Literal>,
    pub kind: LemmaKind,
}

/// The textual form shipped in the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaSpec {
    pub id: String,
    pub kind: LemmaKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub side: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LemmaError {
    #[error("lemma {id}: {source}")]
    Syntax { id: String, source: ParseError },
    #[error("lemma {id}: right-hand side invents variables")]
    FreeInvention { id: String },
    #[error("lemma {id}: empty left-hand side")]
    EmptyLhs { id: String },
}

impl Lemma {
    pub fn from_spec(spec: &LemmaSpec) -> Result<Lemma, LemmaError> {
        let parse = |text: &str| -> Result<Vec<Literal>, LemmaError> {
            if text.trim().is_empty() {
                return Ok(Vec::new());
            }
            parse_query(text).map_err(|source| LemmaError::Syntax { id: spec.id.clone(), source })
        };
        let lemma = Lemma {
            id: spec.id.clone(),
            side_conditions: parse(&spec.side)?,
            lhs: parse(&spec.lhs)?,
            rhs: parse(&spec.rhs)?,
            kind: spec.kind,
        };
        if lemma.lhs.is_empty() {
            return Err(LemmaError::EmptyLhs { id: spec.id.clone() });
        }
        let bound = var_set(lemma.lhs.iter().chain(&lemma.side_conditions));
        let rhs = var_set(&lemma.rhs);
        if !rhs.is_subset(&bound) {
            return Err(LemmaError::FreeInvention { id: spec.id.clone() });
        }
        if lemma.kind == LemmaKind::Equivalence {
            let rbound = var_set(lemma.rhs.iter().chain(&lemma.side_conditions));
            if !var_set(&lemma.lhs).is_subset(&rbound) {
                return Err(LemmaError::FreeInvention { id: spec.id.clone() });
            }
        }
        Ok(lemma)
    }

    pub fn to_spec(&self) -> LemmaSpec {
        let join = |ls: &[Literal]| ls.iter().map(crate::kernel::literal_to_string).collect::<Vec<_>>().join(", ");
        LemmaSpec {
            id: self.id.clone(),
            kind: self.kind,
            side: join(&self.side_conditions),
            lhs: join(&self.lhs),
            rhs: join(&self.rhs),
        }
    }

    /// All literals mentioned by the lemma.
    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.side_conditions.iter().chain(&self.lhs).chain(&self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(side: &str, lhs: &str, rhs: &str) -> LemmaSpec {
        LemmaSpec { id: "t".into(), kind: LemmaKind::Implication, side: side.into(), lhs: lhs.into(), rhs: rhs.into() }
    }

    #[test]
    fn parses_shared_variable_scope() {
        let l = Lemma::from_spec(&spec("append(L1, L2, L3)", "ord1(L3)", "ord1(L1), ord1(L2)")).unwrap();
        assert_eq!(l.side_conditions.len(), 1);
        assert_eq!(l.rhs.len(), 2);
        assert_eq!(Lemma::from_spec(&l.to_spec()).unwrap(), l);
    }

    #[test]
    fn rejects_invented_variables() {
        let e = Lemma::from_spec(&spec("", "ord1(L)", "ord1(M)")).unwrap_err();
        assert!(matches!(e, LemmaError::FreeInvention { .. }));
    }
}
