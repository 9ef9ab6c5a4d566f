use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Symbol used for the empty list.
pub const NIL: &str = "[]";
/// Functor used for list cells.
pub const CONS: &str = "cons";

/// A logic variable. `index` distinguishes renamed-apart copies of the same
/// source name; the parser always produces index 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Arc<str>,
    pub index: u32,
}

impl Var {
    pub fn new(name: &str, index: u32) -> Self {
        Var { name: name.into(), index }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}_{}", self.name, self.index)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    /// Strictly below every integer.
    NegInf,
    Int(i64),
    Sym(Arc<str>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Const(Constant),
    /// Always has at least one argument; nullary symbols are constants.
    Compound(Arc<str>, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name, 0))
    }

    pub fn int(n: i64) -> Term {
        Term::Const(Constant::Int(n))
    }

    pub fn sym(s: &str) -> Term {
        Term::Const(Constant::Sym(s.into()))
    }

    pub fn nil() -> Term {
        Term::sym(NIL)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Compound(CONS.into(), vec![head, tail])
    }

    pub fn compound(functor: &str, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::sym(functor)
        } else {
            Term::Compound(functor.into(), args)
        }
    }

    /// Builds a proper list from `items`.
    pub fn list<I>(items: I) -> Term
    where
        I: IntoIterator<Item = Term>,
        I::IntoIter: DoubleEndedIterator,
    {
        Self::list_with_tail(items, Term::nil())
    }

    pub fn list_with_tail<I>(items: I, tail: Term) -> Term
    where
        I: IntoIterator<Item = Term>,
        I::IntoIter: DoubleEndedIterator,
    {
        items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| Term::cons(item, acc))
    }

    pub fn int_list(items: &[i64]) -> Term {
        Term::list(items.iter().map(|&n| Term::int(n)))
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Term::Const(Constant::Sym(s)) if &**s == NIL)
    }

    pub fn as_cons(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::Compound(f, args) if &**f == CONS && args.len() == 2 => Some((&args[0], &args[1])),
            _ => None,
        }
    }

    /// Elements of a proper ground-or-not list, `None` if the spine is open or malformed.
    pub fn list_items(&self) -> Option<Vec<&Term>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            if cur.is_nil() {
                return Some(out);
            }
            let (h, t) = cur.as_cons()?;
            out.push(h);
            cur = t;
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Total node count.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::Compound(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn occurs(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Const(_) => false,
            Term::Compound(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }
}

/// Predicate identity: name and arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredKey {
    pub name: Arc<str>,
    pub arity: usize,
}

impl PredKey {
    pub fn new(name: &str, arity: usize) -> Self {
        PredKey { name: name.into(), arity }
    }

    /// Parses `name/arity`.
    pub fn parse(s: &str) -> Option<Self> {
        let (name, arity) = s.rsplit_once('/')?;
        if name.is_empty() {
            return None;
        }
        Some(PredKey::new(name, arity.trim().parse().ok()?))
    }
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Arc<str>,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Atom { pred: pred.into(), args }
    }

    pub fn key(&self) -> PredKey {
        PredKey { name: self.pred.clone(), arity: self.args.len() }
    }

    pub fn size(&self) -> usize {
        1 + self.args.iter().map(Term::size).sum::<usize>()
    }
}

/// The interpreted comparisons over integers extended with `neg_inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinOp {
    Leq,
    Lt,
    Eq,
}

impl BuiltinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BuiltinOp::Leq => "=<",
            BuiltinOp::Lt => "<",
            BuiltinOp::Eq => "=",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "leq" => Some(BuiltinOp::Leq),
            "lt" => Some(BuiltinOp::Lt),
            "eq" => Some(BuiltinOp::Eq),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Atom(Atom),
    Builtin(BuiltinOp, Term, Term),
}

impl Literal {
    pub fn atom(pred: &str, args: Vec<Term>) -> Self {
        Literal::Atom(Atom::new(pred, args))
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Literal::Atom(a) => Some(a),
            Literal::Builtin(..) => None,
        }
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self, Literal::Builtin(..))
    }

    pub fn key(&self) -> Option<PredKey> {
        self.as_atom().map(Atom::key)
    }

    pub fn args(&self) -> Vec<&Term> {
        match self {
            Literal::Atom(a) => a.args.iter().collect(),
            Literal::Builtin(_, l, r) => vec![l, r],
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        for t in self.args() {
            t.collect_vars(out);
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(|t| t.size()).sum::<usize>()
    }

    pub fn is_ground(&self) -> bool {
        self.args().iter().all(|t| t.is_ground())
    }
}

/// Variables occurring in a sequence of literals, first-occurrence order.
pub fn vars_of<'a>(lits: impl IntoIterator<Item = &'a Literal>) -> Vec<Var> {
    let mut out = Vec::new();
    for l in lits {
        l.collect_vars(&mut out);
    }
    out
}

pub fn var_set<'a>(lits: impl IntoIterator<Item = &'a Literal>) -> BTreeSet<Var> {
    vars_of(lits).into_iter().collect()
}

impl serde::Serialize for PredKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for PredKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        PredKey::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("expected name/arity, found `{s}`")))
    }
}

/// Atoms and literals serialize to their printed form.
impl serde::Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&super::print::literal_to_string(&Literal::Atom(self.clone())))
    }
}

impl serde::Serialize for Literal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&super::print::literal_to_string(self))
    }
}

impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&super::print::term_to_string(self))
    }
}
