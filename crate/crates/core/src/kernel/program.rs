use std::collections::{BTreeMap, BTreeSet};

use super::term::{vars_of, Atom, Literal, PredKey, Var};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub id: String,
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl Clause {
    pub fn new(id: impl Into<String>, head: Atom, body: Vec<Literal>) -> Self {
        Clause { id: id.into(), head, body }
    }

    pub fn key(&self) -> PredKey {
        self.head.key()
    }

    /// Variables in first-occurrence order, head first.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for t in &self.head.args {
            t.collect_vars(&mut out);
        }
        for l in &self.body {
            l.collect_vars(&mut out);
        }
        out
    }

    pub fn body_vars(&self) -> Vec<Var> {
        vars_of(&self.body)
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("duplicate clause id `{0}`")]
pub struct DuplicateClauseId(pub String);

/// An ordered clause list with stable ids and per-clause provenance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub name: String,
    clauses: Vec<Clause>,
    /// clause id -> id of the step that produced it
    provenance: BTreeMap<String, String>,
}

impl Program {
    pub fn new(name: impl Into<String>) -> Self {
        Program { name: name.into(), ..Default::default() }
    }

    pub fn from_clauses(name: impl Into<String>, clauses: Vec<Clause>) -> Result<Self, DuplicateClauseId> {
        let mut p = Program::new(name);
        for c in clauses {
            p.push(c)?;
        }
        Ok(p)
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn push(&mut self, c: Clause) -> Result<(), DuplicateClauseId> {
        if self.contains_id(&c.id) {
            return Err(DuplicateClauseId(c.id));
        }
        self.clauses.push(c);
        Ok(())
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.clauses.iter().any(|c| c.id == id)
    }

    pub fn clause(&self, id: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.id == id)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.clauses.iter().position(|c| c.id == id)
    }

    pub fn clauses_for<'a>(&'a self, key: &'a PredKey) -> impl Iterator<Item = &'a Clause> + 'a {
        self.clauses.iter().filter(move |c| c.head.pred == key.name && c.head.args.len() == key.arity)
    }

    pub fn defines(&self, key: &PredKey) -> bool {
        self.clauses_for(key).next().is_some()
    }

    /// Predicates with at least one clause, in order of first definition.
    pub fn defined_predicates(&self) -> Vec<PredKey> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for c in &self.clauses {
            let k = c.key();
            if seen.insert(k.clone()) {
                out.push(k);
            }
        }
        out
    }

    /// Every predicate mentioned in a head or body.
    pub fn mentioned_predicates(&self) -> BTreeSet<PredKey> {
        let mut out = BTreeSet::new();
        for c in &self.clauses {
            out.insert(c.key());
            out.extend(c.body.iter().filter_map(Literal::key));
        }
        out
    }

    pub fn provenance(&self, id: &str) -> Option<&str> {
        self.provenance.get(id).map(String::as_str)
    }

    pub fn provenance_map(&self) -> &BTreeMap<String, String> {
        &self.provenance
    }

    pub fn set_provenance(&mut self, id: &str, origin: impl Into<String>) {
        self.provenance.insert(id.to_owned(), origin.into());
    }

    /// Replaces clause `id` by `replacement` at the same position.
    pub fn replace(&mut self, id: &str, replacement: Vec<Clause>) -> bool {
        let Some(pos) = self.position(id) else {
            return false;
        };
        self.clauses.remove(pos);
        self.provenance.remove(id);
        for (k, c) in replacement.into_iter().enumerate() {
            self.clauses.insert(pos + k, c);
        }
        true
    }

    pub fn remove(&mut self, id: &str) -> Option<Clause> {
        let pos = self.position(id)?;
        self.provenance.remove(id);
        Some(self.clauses.remove(pos))
    }

    pub fn clause_mut(&mut self, id: &str) -> Option<&mut Clause> {
        self.clauses.iter_mut().find(|c| c.id == id)
    }

    /// A clause id derived from `base` that is unused in this program.
    pub fn fresh_id(&self, base: &str) -> String {
        if !self.contains_id(base) {
            return base.to_owned();
        }
        (2..)
            .map(|n| format!("{base}_{n}"))
            .find(|id| !self.contains_id(id))
            .expect("unbounded search")
    }

    /// The sub-program consisting of the clauses defining `preds`.
    pub fn restrict_to(&self, preds: &BTreeSet<PredKey>) -> Program {
        Program {
            name: self.name.clone(),
            clauses: self.clauses.iter().filter(|c| preds.contains(&c.key())).cloned().collect(),
            provenance: BTreeMap::new(),
        }
    }

    /// Appends the clauses of `other`, renumbering ids that collide.
    pub fn extend_renumbered(&mut self, other: &Program) {
        for c in other.clauses() {
            let mut c = c.clone();
            c.id = self.fresh_id(&c.id);
            self.clauses.push(c);
        }
    }
}
