//! Argument kinds inferred from how a program uses its terms, so that ground
//! instances of a predicate can be enumerated over integers and int lists.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::kernel::{Clause, Constant, Literal, PredKey, Program, Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgKind {
    Int,
    List,
    Unknown,
}

impl ArgKind {
    fn join(self, other: ArgKind) -> ArgKind {
        match (self, other) {
            (ArgKind::Unknown, k) | (k, ArgKind::Unknown) => k,
            (k, _) => k,
        }
    }
}

fn term_kind(t: &Term) -> ArgKind {
    match t {
        Term::Var(_) => ArgKind::Unknown,
        Term::Const(Constant::Int(_)) | Term::Const(Constant::NegInf) => ArgKind::Int,
        t if t.is_nil() || t.as_cons().is_some() => ArgKind::List,
        _ => ArgKind::Unknown,
    }
}

/// Per-predicate argument kinds. Unknown slots enumerate as integers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub kinds: BTreeMap<PredKey, Vec<ArgKind>>,
    /// The program mentions `neg_inf`, which then joins the integer domain.
    pub uses_neg_inf: bool,
}

impl Signature {
    pub fn of(&self, k: &PredKey) -> Vec<ArgKind> {
        self.kinds.get(k).cloned().unwrap_or_else(|| vec![ArgKind::Unknown; k.arity])
    }
}

struct Inference<'p> {
    slots: HashMap<PredKey, Vec<ArgKind>>,
    p: &'p Program,
}

impl Inference<'_> {
    fn slot(&self, k: &PredKey, i: usize) -> ArgKind {
        self.slots.get(k).map(|v| v[i]).unwrap_or(ArgKind::Unknown)
    }

    fn set_slot(&mut self, k: &PredKey, i: usize, kind: ArgKind) -> bool {
        let v = self.slots.entry(k.clone()).or_insert_with(|| vec![ArgKind::Unknown; k.arity]);
        let joined = v[i].join(kind);
        let changed = joined != v[i];
        v[i] = joined;
        changed
    }

    fn var_kinds(&self, c: &Clause) -> HashMap<Var, ArgKind> {
        let mut out: HashMap<Var, ArgKind> = HashMap::new();
        let mut note = |v: &Var, k: ArgKind| {
            let e = out.entry(v.clone()).or_insert(ArgKind::Unknown);
            *e = e.join(k);
        };
        fn walk(t: &Term, note: &mut dyn FnMut(&Var, ArgKind)) {
            if let Some((h, tl)) = t.as_cons() {
                if let Term::Var(v) = h {
                    note(v, ArgKind::Int);
                }
                if let Term::Var(v) = tl {
                    note(v, ArgKind::List);
                }
                walk(h, note);
                walk(tl, note);
            } else if let Term::Compound(_, args) = t {
                for a in args {
                    walk(a, note);
                }
            }
        }
        let atoms = std::iter::once(&c.head).chain(c.body.iter().filter_map(Literal::as_atom));
        for a in atoms {
            let k = a.key();
            for (i, t) in a.args.iter().enumerate() {
                if let Term::Var(v) = t {
                    note(v, self.slot(&k, i));
                }
                walk(t, &mut note);
            }
        }
        for l in &c.body {
            if let Literal::Builtin(op, x, y) = l {
                for t in [x, y] {
                    if let Term::Var(v) = t {
                        if *op != crate::kernel::BuiltinOp::Eq {
                            note(v, ArgKind::Int);
                        }
                    }
                    walk(t, &mut note);
                }
            }
        }
        // `=` propagates kinds between its sides.
        for l in &c.body {
            if let Literal::Builtin(crate::kernel::BuiltinOp::Eq, x, y) = l {
                let kx = match x {
                    Term::Var(v) => out.get(v).copied().unwrap_or(ArgKind::Unknown),
                    t => term_kind(t),
                };
                let ky = match y {
                    Term::Var(v) => out.get(v).copied().unwrap_or(ArgKind::Unknown),
                    t => term_kind(t),
                };
                if let Term::Var(v) = x {
                    let e = out.entry(v.clone()).or_insert(ArgKind::Unknown);
                    *e = e.join(ky);
                }
                if let Term::Var(v) = y {
                    let e = out.entry(v.clone()).or_insert(ArgKind::Unknown);
                    *e = e.join(kx);
                }
            }
        }
        out
    }

    fn round(&mut self) -> bool {
        let mut changed = false;
        for c in self.p.clauses() {
            let vk = self.var_kinds(c);
            let atoms: Vec<_> = std::iter::once(&c.head).chain(c.body.iter().filter_map(Literal::as_atom)).collect();
            for a in atoms {
                let k = a.key();
                for (i, t) in a.args.iter().enumerate() {
                    let kind = match t {
                        Term::Var(v) => vk.get(v).copied().unwrap_or(ArgKind::Unknown),
                        t => term_kind(t),
                    };
                    if kind != ArgKind::Unknown {
                        changed |= self.set_slot(&k, i, kind);
                    }
                }
            }
        }
        changed
    }
}

/// Infers argument kinds for every predicate mentioned in `p` by propagating
/// list and integer evidence through shared variables to a fixpoint.
pub fn infer_signature(p: &Program) -> Signature {
    let mut inf = Inference { slots: HashMap::new(), p };
    while inf.round() {}
    let mut kinds: BTreeMap<PredKey, Vec<ArgKind>> = inf.slots.into_iter().collect();
    for k in p.mentioned_predicates() {
        kinds.entry(k.clone()).or_insert_with(|| vec![ArgKind::Unknown; k.arity]);
    }
    let uses_neg_inf = p.clauses().iter().any(|c| {
        let mut found = false;
        let mut visit = |t: &Term| found |= mentions_neg_inf(t);
        for t in &c.head.args {
            visit(t);
        }
        for l in &c.body {
            for t in l.args() {
                visit(t);
            }
        }
        found
    });
    Signature { kinds, uses_neg_inf }
}

fn mentions_neg_inf(t: &Term) -> bool {
    match t {
        Term::Const(Constant::NegInf) => true,
        Term::Compound(_, args) => args.iter().any(mentions_neg_inf),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse_program;

    #[test]
    fn infers_list_and_int_slots() {
        let p = parse_program(
            "insert(A, [], [A]).\n\
             insert(A, [B|Ls], [A, B|Ls]) :- A =< B.\n\
             insert(A, [B|Ls1], [B|Ls2]) :- B < A, insert(A, Ls1, Ls2).",
        )
        .unwrap();
        let sig = infer_signature(&p);
        assert_eq!(sig.of(&PredKey::new("insert", 3)), vec![ArgKind::Int, ArgKind::List, ArgKind::List]);
        assert!(!sig.uses_neg_inf);
    }

    #[test]
    fn kinds_flow_through_shared_variables() {
        let p = parse_program("q([]).\np(X) :- q(X).\nr(Y) :- p(Y).").unwrap();
        let sig = infer_signature(&p);
        assert_eq!(sig.of(&PredKey::new("r", 1)), vec![ArgKind::List]);
    }

    #[test]
    fn detects_neg_inf() {
        let p = parse_program("m(neg_inf).").unwrap();
        assert!(infer_signature(&p).uses_neg_inf);
    }
}
